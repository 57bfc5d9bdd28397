#pragma once

#include <cstdint>

#include "docprep/raster.hpp"

namespace docprep {

/// Two-class statistics for a split of the histogram after bin t:
/// class 1 holds bins [0, t], class 2 bins (t, N). Bin centres sit at the bin
/// index.
struct OtsuStats {
    int t = 0;
    double w1 = 0.0, w2 = 0.0;
    double mu1 = 0.0, mu2 = 0.0;
    double var1 = 0.0, var2 = 0.0;
    double sigma_w2 = 0.0; // within-class variance
    double sigma_b2 = 0.0; // between-class variance
    double sigma2 = 0.0;   // total variance
};

/// `split` is the last bin of the dark class (the argmax of the between-class
/// variance, smallest on ties). `threshold` is the level passed to
/// apply_threshold: split + 1, or the only occupied level for a degenerate
/// histogram, which makes every pixel foreground-1.
struct ThresholdDecision {
    int split = 0;
    std::uint32_t threshold = 0;
    double criterion = 0.0;
    bool degenerate = false;
};

enum class Polarity { text_black, text_white };

OtsuStats otsu_stats(const Histogram& h, int t);

/// O(N) search over prefix sums.
ThresholdDecision otsu_threshold(const Histogram& h);

/// g = 1 where f >= threshold, 0 elsewhere.
BinaryImage apply_threshold(const RasterImage& plane, std::uint32_t threshold);

/// Otsu threshold of the whole plane. text_black keeps the bright class at 1
/// (rendered white); text_white inverts.
BinaryImage binarize_otsu(const RasterImage& plane, Polarity polarity = Polarity::text_black);

} // namespace docprep
