#pragma once

#include <limits>
#include <vector>

namespace dualdiv {

struct ExpTerm {
    double coeff = 0.0;
    double rate = 0.0;
};

/// sum_i coeff_i e^{rate_i u} + constant + slope u on the interval (lo, hi].
struct Segment {
    double lo = 0.0;
    double hi = std::numeric_limits<double>::infinity();
    std::vector<ExpTerm> exps;
    double constant = 0.0;
    double slope = 0.0;

    double value(double u) const;
    double derivative(double u) const;
};

/// Piecewise exponential-plus-linear function on [0, inf). Segments are
/// contiguous and ordered; the first starts at 0 and the last is unbounded.
/// A point equal to a segment boundary belongs to the left segment.
class PiecewiseExp {
public:
    explicit PiecewiseExp(std::vector<Segment> segments);

    double value(double x) const;
    double derivative(double x) const;
    const std::vector<Segment>& segments() const { return segments_; }

private:
    const Segment& segment_at(double x) const;
    std::vector<Segment> segments_;
};

}  // namespace dualdiv
