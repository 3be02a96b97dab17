#include "quadsurf/criteria.hpp"

#include <cmath>
#include <cstdio>

namespace quadsurf {

namespace {

std::string fmt(const char *format, double a, double b = 0, double c = 0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, format, a, b, c);
    return buf;
}

const Series *find_series(const ExperimentReport &r, const std::string &name) {
    for (const auto &s : r.series)
        if (s.experiment == name) return &s;
    return nullptr;
}

}  // namespace

CheckResult check_knapp(const ExperimentReport &report) {
    const Series *norm = find_series(report, "knapp-norm");
    const Series *ratio = find_series(report, "knapp-ratio");
    if (!norm || !ratio || !norm->fit || !ratio->fit) return {false, "Knapp report has no fitted series"};
    double dn = norm->fit->slope - norm->predicted_slope;
    double dr = ratio->fit->slope - ratio->predicted_slope;
    CheckResult c;
    c.pass = std::fabs(dn) <= kKnappSlopeTolerance && dr <= kKnappRatioTolerance;
    c.detail = fmt("norm slope %.4f (predicted %.4f)", norm->fit->slope, norm->predicted_slope) +
               fmt(", ratio slope %.4f (predicted %.4f)", ratio->fit->slope, ratio->predicted_slope);
    return c;
}

CheckResult check_square_function(const ExperimentReport &report) {
    CheckResult c{!report.series.empty(), ""};
    for (const auto &s : report.series) {
        if (!c.detail.empty()) c.detail += ", ";
        if (!s.fit) {
            c.pass = false;
            c.detail += fmt("q=%g unfitted", s.q);
            continue;
        }
        bool ok = std::fabs(s.fit->slope - s.predicted_slope) <= kSquareFnSlopeTolerance;
        c.pass = c.pass && ok;
        c.detail += fmt("q=%g slope %.4f (predicted %.4f)", s.q, s.fit->slope, s.predicted_slope);
        if (!ok) c.detail += " out of tolerance";
    }
    return c;
}

CheckResult check_decay(const ExperimentReport &report) {
    const Series *s = find_series(report, "decay-normalized");
    if (!s || !s->fit) return {false, "decay report has no fitted normalized series"};
    return {std::fabs(s->fit->slope - s->predicted_slope) <= kDecaySlopeTolerance,
            fmt("normalized slope %.4f (predicted %.4f)", s->fit->slope, s->predicted_slope)};
}

CheckResult check_bilinear(const ExperimentReport &report) {
    double monotone = report.extra("monotone"), saturation = report.extra("saturation");
    if (std::isnan(monotone) || std::isnan(saturation)) return {false, "bilinear report lacks monotone/saturation"};
    bool ok = monotone == 1 && saturation >= 1 - kBilinearSaturationGap && saturation <= 1 + kBilinearOvershoot;
    return {ok, fmt("monotone=%g, last/oracle %.4f", monotone, saturation)};
}

CheckResult check_jacobian(const JacobianResult &result) {
    bool ok = result.max_relative_error == 0 && result.samples > 0;
    return {ok, to_string(result.jcase) + ": " + std::to_string(result.samples) + " samples, " +
                    std::to_string(result.degenerate) + " degenerate, max relative error " +
                    to_string(result.max_relative_error)};
}

}  // namespace quadsurf
