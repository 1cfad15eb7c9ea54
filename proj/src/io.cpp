#include "pgpca/io.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "pgpca/error.hpp"

namespace pgpca::io {
namespace {

bool parse_row(const std::string& line, std::vector<double>& out) {
  out.clear();
  std::size_t pos = 0;
  while (pos <= line.size()) {
    std::size_t comma = line.find(',', pos);
    if (comma == std::string::npos) comma = line.size();
    std::string cell = line.substr(pos, comma - pos);
    const auto first = cell.find_first_not_of(" \t\r");
    const auto last = cell.find_last_not_of(" \t\r");
    if (first == std::string::npos) return false;
    cell = cell.substr(first, last - first + 1);
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(cell.c_str(), &end);
    if (end != cell.c_str() + cell.size() || (errno == ERANGE && std::isinf(v))) return false;
    out.push_back(v);
    pos = comma + 1;
  }
  return true;
}

std::string format(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

template <class M>
void write_matrix(const std::string& path, const M& data, const std::vector<std::string>& header) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::Io, "cannot open '" + path + "' for writing");
  if (!header.empty()) {
    for (std::size_t c = 0; c < header.size(); ++c) out << (c ? "," : "") << header[c];
    out << '\n';
  }
  for (Eigen::Index r = 0; r < data.rows(); ++r) {
    for (Eigen::Index c = 0; c < data.cols(); ++c) out << (c ? "," : "") << format(data(r, c));
    out << '\n';
  }
  if (!out) throw Error(ErrorKind::Io, "failed writing '" + path + "'");
}

Json flat(const Matrix& m) {
  Json arr = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) arr.push_back(m(r, c));
  return arr;
}

Matrix unflat(const Json& arr, Eigen::Index rows, Eigen::Index cols) {
  if (!arr.is_array() || static_cast<Eigen::Index>(arr.size()) != rows * cols) {
    throw Error(ErrorKind::Parse, "matrix field has " + std::to_string(arr.size()) + " entries, expected " +
                                      std::to_string(rows * cols));
  }
  Matrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = arr.at(static_cast<std::size_t>(r * cols + c)).get<double>();
  return m;
}

Json vec(const Vector& v) { return Json(std::vector<double>(v.data(), v.data() + v.size())); }

Vector unvec(const Json& arr) {
  const auto values = arr.get<std::vector<double>>();
  return Eigen::Map<const Vector>(values.data(), static_cast<Eigen::Index>(values.size()));
}

template <class F>
auto guarded(F&& f) {
  try {
    return f();
  } catch (const Json::exception& e) {
    throw Error(ErrorKind::Parse, e.what());
  }
}

}  // namespace

DataMatrix read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open '" + path + "'");
  std::vector<double> values;
  std::vector<double> row;
  std::string line;
  Eigen::Index cols = -1;
  Eigen::Index rows = 0;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    if (!parse_row(line, row)) {
      if (rows == 0 && line_no == 1) continue;  // header
      throw Error(ErrorKind::Parse, path + ":" + std::to_string(line_no) + ": not a numeric row");
    }
    if (cols < 0) cols = static_cast<Eigen::Index>(row.size());
    if (static_cast<Eigen::Index>(row.size()) != cols) {
      throw Error(ErrorKind::Parse, path + ":" + std::to_string(line_no) + ": expected " + std::to_string(cols) +
                                        " columns, got " + std::to_string(row.size()));
    }
    values.insert(values.end(), row.begin(), row.end());
    ++rows;
  }
  if (rows == 0) throw Error(ErrorKind::Parse, "'" + path + "' contains no data rows");
  return Eigen::Map<const DataMatrix>(values.data(), rows, cols);
}

void write_csv(const std::string& path, const Matrix& data, const std::vector<std::string>& header) {
  write_matrix(path, data, header);
}

void write_csv(const std::string& path, const DataMatrix& data, const std::vector<std::string>& header) {
  write_matrix(path, data, header);
}

Json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open '" + path + "'");
  return guarded([&] { return Json::parse(in); });
}

void write_json(const std::string& path, const Json& doc) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::Io, "cannot open '" + path + "' for writing");
  out << doc.dump(2) << '\n';
  if (!out) throw Error(ErrorKind::Io, "failed writing '" + path + "'");
}

Json to_json(const Manifold& manifold) {
  Json doc;
  doc["variant"] = manifold.variant_name();
  std::visit(
      [&](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Ellipse2D>) {
          doc["a"] = v.a;
          doc["b"] = v.b;
        } else if constexpr (std::is_same_v<T, TorusR3>) {
          doc["major"] = v.major;
          doc["minor"] = v.minor;
        } else if constexpr (std::is_same_v<T, ConstantPoint>) {
          doc["point"] = vec(v.point);
        } else {
          doc["dim"] = v.ambient_dim();
          doc["knot_count"] = v.segments();
          doc["knots"] = flat(v.knots());
          doc["ordering"] = v.ordering();
          doc["breaks"] = v.breaks();
          doc["coefficients"] = flat(v.coefficients());
          doc["length"] = v.length();
        }
      },
      manifold.variant());
  return doc;
}

Manifold manifold_from_json(const Json& doc) {
  return guarded([&]() -> Manifold {
    const auto variant = doc.at("variant").get<std::string>();
    if (variant == "ellipse") return Manifold::ellipse(doc.value("a", 1.0), doc.value("b", 2.0));
    if (variant == "torus") return Manifold::torus(doc.value("major", 3.0), doc.value("minor", 1.0));
    if (variant == "constant") return Manifold::constant(unvec(doc.at("point")));
    if (variant == "closed_spline") {
      const auto n = doc.at("dim").get<Eigen::Index>();
      const auto k = doc.at("knot_count").get<Eigen::Index>();
      return Manifold(ClosedSpline::from_parts(unflat(doc.at("knots"), k, n), doc.at("ordering").get<std::vector<int>>(),
                                               doc.at("breaks").get<std::vector<double>>(),
                                               unflat(doc.at("coefficients"), 4 * k, n)));
    }
    throw Error(ErrorKind::Parse, "unknown manifold variant '" + variant + "'");
  });
}

Json to_json(const PgpcaModel& model) {
  if (model.coords.kind() == CoordinateField::Kind::Custom) {
    throw Error(ErrorKind::InvalidArgument, "custom coordinate fields cannot be serialized");
  }
  Json doc;
  doc["n"] = model.ambient_dim();
  doc["m"] = model.model_dim();
  doc["C"] = flat(model.loading);
  doc["sigma2"] = model.sigma2;
  Json z = Json::array();
  for (const auto& p : model.landmarks.points) z.push_back(std::vector<double>(p.data(), p.data() + p.size()));
  doc["landmarks"] = z;
  doc["weights"] = vec(model.landmarks.weights);
  doc["manifold"] = to_json(model.manifold);
  doc["coords"] = model.coords.name();
  return doc;
}

PgpcaModel pgpca_model_from_json(const Json& doc) {
  return guarded([&] {
    Manifold manifold = manifold_from_json(doc.at("manifold"));
    const auto coords_name = doc.at("coords").get<std::string>();
    CoordinateField coords = coords_name == "eucov"   ? CoordinateField::euclidean()
                             : coords_name == "gecov" ? CoordinateField::geometric(manifold)
                                                      : throw Error(ErrorKind::Parse, "unknown coords '" + coords_name + "'");
    const auto n = doc.at("n").get<Eigen::Index>();
    const auto m = doc.at("m").get<Eigen::Index>();
    LandmarkSet landmarks;
    for (const auto& z : doc.at("landmarks")) landmarks.points.push_back(unvec(z));
    landmarks.weights = unvec(doc.at("weights"));
    PgpcaModel model{std::move(manifold), std::move(coords), std::move(landmarks), unflat(doc.at("C"), n, m),
                     doc.at("sigma2").get<double>()};
    model.validate();
    return model;
  });
}

Json to_json(const PpcaModel& model) {
  Json doc;
  doc["n"] = model.mean.size();
  doc["m"] = model.loading.cols();
  doc["mean"] = vec(model.mean);
  doc["C"] = flat(model.loading);
  doc["sigma2"] = model.sigma2;
  return doc;
}

PpcaModel ppca_model_from_json(const Json& doc) {
  return guarded([&] {
    const auto n = doc.at("n").get<Eigen::Index>();
    const auto m = doc.at("m").get<Eigen::Index>();
    PpcaModel model{unvec(doc.at("mean")), unflat(doc.at("C"), n, m), doc.at("sigma2").get<double>()};
    if (model.mean.size() != n) throw Error(ErrorKind::Parse, "mean has the wrong length");
    return model;
  });
}

Json to_json(const FitReport& report) {
  Json doc;
  doc["elbo_trace"] = report.elbo_trace;
  doc["loglik_trace"] = report.loglik_trace;
  doc["final_log_likelihood"] = report.final_log_likelihood;
  doc["iterations"] = report.iterations;
  doc["converged"] = report.converged;
  doc["elbo_non_decreasing"] = report.elbo_non_decreasing();
  doc["clamped"] = report.clamped;
  doc["floored"] = report.floored;
  doc["restart"] = report.restart;
  doc["warnings"] = report.warnings;
  return doc;
}

Json to_json(const TTestResult& test) {
  Json doc;
  // +-inf is not representable in JSON; emit a string for those.
  if (std::isfinite(test.t)) {
    doc["t"] = test.t;
  } else {
    doc["t"] = test.t > 0 ? "inf" : "-inf";
  }
  doc["p"] = test.p;
  doc["dof"] = test.dof;
  return doc;
}

Json to_json(const ComparisonReport& report) {
  Json doc;
  doc["source"] = report.source;
  doc["dim"] = report.dim;
  doc["learn_weights"] = report.learn_weights;
  Json models = Json::array();
  for (const auto& m : report.models) {
    Json entry;
    entry["name"] = m.name;
    entry["mean_ll"] = m.mean_ll;
    entry["scores"] = m.scores;
    if (m.report) entry["fit"] = to_json(*m.report);
    models.push_back(entry);
  }
  doc["models"] = models;
  doc["winner"] = report.winner;
  doc["coordinate_test"] = to_json(report.coordinate_test);
  doc["winner_vs_ppca"] = to_json(report.winner_vs_ppca);
  doc["significant"] = report.significant;
  return doc;
}

Json to_json(const GridColumn& column) {
  Json doc;
  doc["label"] = column.label;
  doc["true_coords"] = column.true_coords;
  doc["gecov"] = column.gecov;
  doc["eucov"] = column.eucov;
  doc["ppca"] = column.ppca;
  Json runs = Json::array();
  for (const auto& r : column.runs) runs.push_back(to_json(r));
  doc["runs"] = runs;
  return doc;
}

Manifold load_manifold(const std::string& name_or_path) {
  if (name_or_path == "ellipse") return Manifold::ellipse();
  if (name_or_path == "torus") return Manifold::torus();
  if (!std::filesystem::exists(name_or_path)) {
    throw Error(ErrorKind::Io, "manifold '" + name_or_path + "' is neither 'ellipse', 'torus' nor an existing file");
  }
  return manifold_from_json(read_json(name_or_path));
}

}  // namespace pgpca::io
