#pragma once

#include <string>

#include "json.hpp"
#include "pgpca/eval.hpp"
#include "pgpca/manifold.hpp"
#include "pgpca/pgpca.hpp"
#include "pgpca/ppca.hpp"

namespace pgpca::io {

using Json = nlohmann::json;

/// Numeric CSV, one sample per row. A first line that does not parse as
/// numbers is treated as a header and skipped.
DataMatrix read_csv(const std::string& path);
/// Writes with 17 significant digits so values round-trip exactly.
void write_csv(const std::string& path, const Matrix& data, const std::vector<std::string>& header = {});
void write_csv(const std::string& path, const DataMatrix& data, const std::vector<std::string>& header = {});

Json read_json(const std::string& path);
void write_json(const std::string& path, const Json& doc);

Json to_json(const Manifold& manifold);
Manifold manifold_from_json(const Json& doc);

/// {n, m, C (row-major), sigma2, landmarks, weights, manifold, coords}.
Json to_json(const PgpcaModel& model);
PgpcaModel pgpca_model_from_json(const Json& doc);

Json to_json(const PpcaModel& model);
PpcaModel ppca_model_from_json(const Json& doc);

Json to_json(const FitReport& report);
Json to_json(const TTestResult& test);
Json to_json(const ComparisonReport& report);
Json to_json(const GridColumn& column);

/// Resolves `ellipse`, `torus` or a path to a manifold JSON file.
Manifold load_manifold(const std::string& name_or_path);

}  // namespace pgpca::io
