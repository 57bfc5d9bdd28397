#include "docprep/binarize.hpp"

#include <vector>

namespace docprep {

OtsuStats otsu_stats(const Histogram& h, int t)
{
    if (h.total == 0)
        throw Error("otsu_stats: empty histogram");
    if (t < 0 || t >= static_cast<int>(h.bins.size()))
        throw Error("otsu_stats: split outside bin range");

    const double total = static_cast<double>(h.total);
    const std::size_t n = h.bins.size();
    OtsuStats s;
    s.t = t;

    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double p = h.bins[i] / total;
        mean += p * static_cast<double>(i);
        if (static_cast<int>(i) <= t) {
            s.w1 += p;
            s.mu1 += p * static_cast<double>(i);
        } else {
            s.w2 += p;
            s.mu2 += p * static_cast<double>(i);
        }
    }
    s.mu1 = s.w1 > 0.0 ? s.mu1 / s.w1 : 0.0;
    s.mu2 = s.w2 > 0.0 ? s.mu2 / s.w2 : 0.0;

    for (std::size_t i = 0; i < n; ++i) {
        if (h.bins[i] == 0)
            continue;
        const double p = h.bins[i] / total;
        const double x = static_cast<double>(i);
        s.sigma2 += p * (x - mean) * (x - mean);
        if (static_cast<int>(i) <= t)
            s.var1 += p * (x - s.mu1) * (x - s.mu1);
        else
            s.var2 += p * (x - s.mu2) * (x - s.mu2);
    }
    s.var1 = s.w1 > 0.0 ? s.var1 / s.w1 : 0.0;
    s.var2 = s.w2 > 0.0 ? s.var2 / s.w2 : 0.0;
    s.sigma_w2 = s.w1 * s.var1 + s.w2 * s.var2;
    s.sigma_b2 = (s.w1 > 0.0 && s.w2 > 0.0) ? s.w1 * s.w2 * (s.mu1 - s.mu2) * (s.mu1 - s.mu2) : 0.0;
    return s;
}

ThresholdDecision otsu_threshold(const Histogram& h)
{
    if (h.total == 0)
        throw Error("otsu_threshold: empty histogram");

    const std::size_t n = h.bins.size();
    int occupied = 0;
    int only = 0;
    for (std::size_t i = 0; i < n; ++i)
        if (h.bins[i] > 0) {
            ++occupied;
            only = static_cast<int>(i);
        }
    if (occupied == 1)
        return {only, static_cast<std::uint32_t>(only), 0.0, true};

    const double total = static_cast<double>(h.total);
    std::uint64_t all_weighted = 0;
    for (std::size_t i = 0; i < n; ++i)
        all_weighted += h.bins[i] * i;

    ThresholdDecision best;
    best.criterion = -1.0;
    std::uint64_t count1 = 0;
    std::uint64_t weighted1 = 0;
    for (std::size_t t = 0; t < n; ++t) {
        count1 += h.bins[t];
        weighted1 += h.bins[t] * t;
        const std::uint64_t count2 = h.total - count1;
        double criterion = 0.0;
        if (count1 > 0 && count2 > 0) {
            const double w1 = count1 / total;
            const double w2 = count2 / total;
            const double mu1 = static_cast<double>(weighted1) / count1;
            const double mu2 = static_cast<double>(all_weighted - weighted1) / count2;
            criterion = w1 * w2 * (mu1 - mu2) * (mu1 - mu2);
        }
        if (criterion > best.criterion) {
            best.criterion = criterion;
            best.split = static_cast<int>(t);
        }
    }
    best.threshold = static_cast<std::uint32_t>(best.split) + 1;
    return best;
}

BinaryImage apply_threshold(const RasterImage& plane, std::uint32_t threshold)
{
    if (plane.channels() != 1)
        throw Error("apply_threshold: plane must be single-channel");
    BinaryImage out(plane.width(), plane.height());
    auto src = plane.data();
    auto dst = out.data();
    for (std::size_t i = 0; i < dst.size(); ++i)
        dst[i] = src[i] >= threshold ? 1 : 0;
    return out;
}

BinaryImage binarize_otsu(const RasterImage& plane, Polarity polarity)
{
    auto decision = otsu_threshold(histogram(plane));
    auto out = apply_threshold(plane, decision.threshold);
    if (polarity == Polarity::text_white)
        for (auto& v : out.data())
            v = 1 - v;
    return out;
}

} // namespace docprep
