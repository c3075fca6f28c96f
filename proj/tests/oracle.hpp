#pragma once

// Test-only reference implementation of the windowed inefficiency metric and
// the detection rule, written straight from the definition: per window, sum
// |adjacent difference| (skipping pairs with a missing endpoint) for the
// total distance, take |sum of the same differences| for the net distance,
// scale the excess by 1000 over the count of present samples, and flag every
// sample of every window whose metric exceeds the threshold. Deliberately
// shares no code with the library so it can serve as an independent oracle.

#include <cmath>
#include <cstddef>
#include <vector>

namespace oracle {

struct Window {
    std::size_t start = 0;
    double tdt = 0.0;
    double datcf = 0.0;
    int valid = 0;
    double im = 0.0;
};

inline std::vector<Window> windows(const std::vector<double>& pv, int ws) {
    std::vector<Window> out;
    if (ws < 2 || pv.size() < static_cast<std::size_t>(ws)) return out;
    for (std::size_t s = 0; s + ws <= pv.size(); ++s) {
        Window w;
        w.start = s;
        double sum = 0.0;
        for (int k = 0; k < ws; ++k) {
            if (!std::isnan(pv[s + k])) ++w.valid;
        }
        for (int k = 1; k < ws; ++k) {
            const double a = pv[s + k - 1];
            const double b = pv[s + k];
            if (std::isnan(a) || std::isnan(b)) continue;
            w.tdt += std::fabs(b - a);
            sum += b - a;
        }
        w.datcf = std::fabs(sum);
        if (w.valid >= 2) {
            w.im = (w.tdt - w.datcf) * 1000.0 / w.valid;
            if (w.im < 0.0) w.im = 0.0;
        } else {
            w.tdt = 0.0;
            w.datcf = 0.0;
            w.im = 0.0;
        }
        out.push_back(w);
    }
    return out;
}

inline std::vector<bool> detect(const std::vector<double>& pv, int ws, double it) {
    std::vector<bool> mask(pv.size(), false);
    for (const Window& w : windows(pv, ws)) {
        if (w.im > it) {
            for (std::size_t j = w.start; j < w.start + ws; ++j) mask[j] = true;
        }
    }
    return mask;
}

}  // namespace oracle
