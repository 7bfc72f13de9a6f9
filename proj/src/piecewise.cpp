#include "dualdiv/piecewise.hpp"

#include <cmath>

#include "dualdiv/errors.hpp"

namespace dualdiv {

double Segment::value(double u) const {
    double v = constant + slope * u;
    for (const auto& t : exps) v += t.coeff * std::exp(t.rate * u);
    return v;
}

double Segment::derivative(double u) const {
    double v = slope;
    for (const auto& t : exps) v += t.coeff * t.rate * std::exp(t.rate * u);
    return v;
}

PiecewiseExp::PiecewiseExp(std::vector<Segment> segments) : segments_(std::move(segments)) {
    if (segments_.empty() || segments_.front().lo != 0.0 || !std::isinf(segments_.back().hi)) {
        throw Error(Errc::InvalidInput, "piecewise function must cover [0, inf)");
    }
    for (std::size_t i = 1; i < segments_.size(); ++i) {
        if (segments_[i].lo != segments_[i - 1].hi || !(segments_[i].hi > segments_[i].lo)) {
            throw Error(Errc::InvalidInput, "piecewise segments must be contiguous and ordered");
        }
    }
}

const Segment& PiecewiseExp::segment_at(double x) const {
    for (const auto& s : segments_) {
        if (x <= s.hi) return s;
    }
    return segments_.back();
}

double PiecewiseExp::value(double x) const { return segment_at(x).value(x); }

double PiecewiseExp::derivative(double x) const { return segment_at(x).derivative(x); }

}  // namespace dualdiv
