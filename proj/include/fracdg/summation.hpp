#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace fracdg {

// Pairwise (tree) reduction over a fixed-order term list. Keeps roundoff
// growth at O(log n) and makes every report independent of thread count:
// workers fill disjoint slots of the term vector, the reduction order is
// a function of the vector alone.
inline double pairwise_sum(std::span<const double> terms) {
    const std::size_t n = terms.size();
    if (n == 0) return 0.0;
    if (n <= 8) {
        double s = 0.0;
        for (double t : terms) s += t;
        return s;
    }
    const std::size_t half = n / 2;
    return pairwise_sum(terms.subspan(0, half)) + pairwise_sum(terms.subspan(half));
}

// Accumulator that buffers terms and reduces pairwise on demand.
class PairwiseAccumulator {
public:
    void add(double t) { terms_.push_back(t); }
    void reserve(std::size_t n) { terms_.reserve(n); }
    double sum() const { return pairwise_sum(terms_); }
    std::size_t size() const { return terms_.size(); }

private:
    std::vector<double> terms_;
};

} // namespace fracdg
