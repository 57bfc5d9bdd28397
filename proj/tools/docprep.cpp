#include "docprep/cli.hpp"

int main(int argc, char** argv)
{
    return docprep::cli::parse_and_dispatch(argc, argv);
}
