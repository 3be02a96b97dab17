#pragma once

#include "quadsurf/experiments.hpp"
#include "quadsurf/pencil.hpp"

#include <json.hpp>

#include <ostream>
#include <string>

namespace quadsurf {

// Header: experiment,surface,R,q,p,measured,predicted_slope,fitted_slope,residual.
// One line per row in series order; reals in %.10e, NaN as "nan". The
// residual is log(measured) minus the fitted line at log(R).
void write_csv(std::ostream &os, const ExperimentReport &report);
std::string csv_string(const ExperimentReport &report);

// {experiment, surface, series: [{experiment, surface, q, p, predicted_slope,
//  rows: [{R, measured, predicted_exponent, notes}],
//  fit: {slope, intercept, max_residual, n_points} | null}], extras: {key: value}}
// NaN and infinities are written as null.
nlohmann::json to_json(const ExperimentReport &report);

nlohmann::json to_json(const ClassificationCertificate &cert);
// Aligned "field  value" lines for terminals.
std::string certificate_table(const ClassificationCertificate &cert);

}  // namespace quadsurf
