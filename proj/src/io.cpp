#include "opkernel/io.hpp"

#include <fstream>
#include <sstream>

namespace opk {

json complex_to_json(const Complex& z) {
  return json::array({z.real(), z.imag()});
}

Complex complex_from_json(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw MalformedKernelError(where + ": complex scalar must be [re, im]");
  return Complex(j[0].get<double>(), j[1].get<double>());
}

json matrix_to_json(const Matrix& mat) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < mat.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < mat.cols(); ++j)
      row.push_back(complex_to_json(mat(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty())
    throw MalformedKernelError(where + ": matrix must be a nonempty array");
  const Eigen::Index rows = static_cast<Eigen::Index>(j.size());
  if (!j[0].is_array())
    throw MalformedKernelError(where + ": matrix rows must be arrays");
  const Eigen::Index cols = static_cast<Eigen::Index>(j[0].size());
  Matrix out(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    if (!j[i].is_array() || static_cast<Eigen::Index>(j[i].size()) != cols)
      throw MalformedKernelError(where + ": ragged matrix rows");
    for (Eigen::Index c = 0; c < cols; ++c)
      out(i, c) = complex_from_json(j[i][c], where);
  }
  return out;
}

json algebra_to_json(const Algebra& algebra) {
  json j;
  if (algebra.origin() == AlgebraOrigin::matrix_blocks) {
    j["type"] = "matrix_blocks";
    j["dims"] = algebra.block_dims();
  } else {
    j["type"] = "group";
    j["table"] = algebra.group_table();
    j["identity"] = algebra.group_identity();
  }
  return j;
}

AlgebraPtr algebra_from_json(const json& j) {
  if (!j.is_object() || !j.contains("type") || !j["type"].is_string())
    throw MalformedKernelError("algebra: object with a \"type\" required");
  const std::string type = j["type"].get<std::string>();
  if (type == "matrix_blocks") {
    if (!j.contains("dims") || !j["dims"].is_array())
      throw MalformedKernelError("algebra: matrix_blocks needs \"dims\"");
    std::vector<int> dims;
    for (const auto& d : j["dims"]) {
      if (!d.is_number_integer())
        throw MalformedKernelError("algebra: dims must be integers");
      dims.push_back(d.get<int>());
    }
    return Algebra::from_matrix_blocks(dims);
  }
  if (type == "group") {
    if (!j.contains("table") || !j["table"].is_array() ||
        !j.contains("identity") || !j["identity"].is_number_integer())
      throw MalformedKernelError(
          "algebra: group needs \"table\" and \"identity\"");
    std::vector<std::vector<int>> table;
    for (const auto& row : j["table"]) {
      if (!row.is_array())
        throw MalformedKernelError("algebra: table rows must be arrays");
      std::vector<int> r;
      for (const auto& v : row) {
        if (!v.is_number_integer())
          throw MalformedKernelError("algebra: table entries must be integers");
        r.push_back(v.get<int>());
      }
      table.push_back(std::move(r));
    }
    return Algebra::from_group_table(table, j["identity"].get<int>());
  }
  throw MalformedKernelError("algebra: unknown type \"" + type + "\"");
}

namespace {

std::string block_key(int i, int j, int alpha) {
  std::ostringstream os;
  os << i + 1 << "," << j + 1 << "," << alpha + 1;
  return os.str();
}

void parse_block_key(const std::string& key, int m, int D, int& i, int& j,
                     int& alpha) {
  std::istringstream is(key);
  char c1 = 0, c2 = 0;
  if (!(is >> i >> c1 >> j >> c2 >> alpha) || c1 != ',' || c2 != ',' ||
      !(is >> std::ws).eof())
    throw MalformedKernelError("kernel: bad block key \"" + key + "\"");
  if (i < 1 || i > m || j < 1 || j > m || alpha < 1 || alpha > D)
    throw MalformedKernelError("kernel: block key \"" + key +
                               "\" out of range");
  --i;
  --j;
  --alpha;
}

}  // namespace

json kernel_to_json(const OperatorKernel& K) {
  json j;
  j["points"] = K.points();
  j["hdim"] = K.hdim();
  j["algebra"] = algebra_to_json(*K.algebra());
  json blocks = json::object();
  for (int i = 0; i < K.num_points(); ++i)
    for (int jj = 0; jj < K.num_points(); ++jj)
      for (int alpha = 0; alpha < K.algebra()->dim(); ++alpha) {
        const Matrix& b = K.block(i, jj, alpha);
        if (b.isZero(0.0)) continue;  // omitted keys mean zero blocks
        blocks[block_key(i, jj, alpha)] = matrix_to_json(b);
      }
  j["blocks"] = std::move(blocks);
  return j;
}

OperatorKernel kernel_from_json(const json& j) {
  if (!j.is_object())
    throw MalformedKernelError("kernel: top level must be an object");
  for (const char* field : {"points", "hdim", "algebra", "blocks"})
    if (!j.contains(field))
      throw MalformedKernelError(std::string("kernel: missing \"") + field +
                                 "\"");
  if (!j["points"].is_array() || j["points"].empty())
    throw MalformedKernelError("kernel: \"points\" must be a nonempty array");
  std::vector<std::string> points;
  for (const auto& p : j["points"]) {
    if (!p.is_string())
      throw MalformedKernelError("kernel: point labels must be strings");
    points.push_back(p.get<std::string>());
  }
  if (!j["hdim"].is_number_integer() || j["hdim"].get<int>() < 1)
    throw MalformedKernelError("kernel: \"hdim\" must be a positive integer");
  const int hdim = j["hdim"].get<int>();
  AlgebraPtr algebra = algebra_from_json(j["algebra"]);
  if (!j["blocks"].is_object())
    throw MalformedKernelError("kernel: \"blocks\" must be an object");

  const int m = static_cast<int>(points.size());
  const int D = algebra->dim();
  std::vector<Matrix> blocks(static_cast<std::size_t>(m) * m * D,
                             Matrix::Zero(hdim, hdim));
  for (auto it = j["blocks"].begin(); it != j["blocks"].end(); ++it) {
    int bi = 0, bj = 0, alpha = 0;
    parse_block_key(it.key(), m, D, bi, bj, alpha);
    Matrix b = matrix_from_json(it.value(), "kernel block " + it.key());
    if (b.rows() != hdim || b.cols() != hdim)
      throw MalformedKernelError("kernel: block " + it.key() +
                                 " must be hdim x hdim");
    blocks[(static_cast<std::size_t>(bi) * m + bj) * D + alpha] = std::move(b);
  }
  return OperatorKernel::create(std::move(points), hdim, std::move(algebra),
                                std::move(blocks));
}

json factorization_to_json(const Factorization& fact) {
  json j;
  j["r"] = fact.r;
  json V = json::object();
  for (std::size_t t = 0; t < fact.V.size(); ++t)
    V[std::to_string(t + 1)] = matrix_to_json(fact.V[t]);
  j["V"] = std::move(V);
  json pi = json::object();
  for (std::size_t alpha = 0; alpha < fact.pi.size(); ++alpha)
    pi[std::to_string(alpha + 1)] = matrix_to_json(fact.pi[alpha]);
  j["pi"] = std::move(pi);
  j["diagnostics"] = {
      {"gram_truncation_error", fact.diagnostics.gram_truncation_error},
      {"pi_residual", fact.diagnostics.pi_residual},
      {"reconstruction_residual", fact.diagnostics.reconstruction_residual}};
  return j;
}

Factorization factorization_from_json(const json& j,
                                      const OperatorKernel& owner) {
  if (!j.is_object() || !j.contains("r") || !j.contains("V") ||
      !j.contains("pi"))
    throw MalformedKernelError("factorization: needs \"r\", \"V\", \"pi\"");
  if (!j["r"].is_number_integer() || j["r"].get<int>() < 0)
    throw MalformedKernelError("factorization: \"r\" must be >= 0");
  const int r = j["r"].get<int>();
  const int m = owner.num_points();
  const int D = owner.algebra()->dim();

  std::vector<Matrix> V(m, Matrix::Zero(r, owner.hdim()));
  std::vector<Matrix> pi(D, Matrix::Zero(r, r));
  if (r > 0) {
    for (int t = 0; t < m; ++t) {
      const std::string key = std::to_string(t + 1);
      if (!j["V"].contains(key))
        throw MalformedKernelError("factorization: missing V for point " +
                                   key);
      V[t] = matrix_from_json(j["V"][key], "factorization V " + key);
    }
    for (int alpha = 0; alpha < D; ++alpha) {
      const std::string key = std::to_string(alpha + 1);
      if (!j["pi"].contains(key))
        throw MalformedKernelError(
            "factorization: missing pi for basis index " + key);
      pi[alpha] = matrix_from_json(j["pi"][key], "factorization pi " + key);
    }
  }

  FactorizationDiagnostics diag;
  if (j.contains("diagnostics") && j["diagnostics"].is_object()) {
    const json& d = j["diagnostics"];
    if (d.contains("gram_truncation_error"))
      diag.gram_truncation_error = d["gram_truncation_error"].get<double>();
    if (d.contains("pi_residual"))
      diag.pi_residual = d["pi_residual"].get<double>();
    if (d.contains("reconstruction_residual"))
      diag.reconstruction_residual =
          d["reconstruction_residual"].get<double>();
  }
  return assemble_factorization(owner, std::move(V), std::move(pi), diag);
}

json certificate_to_json(const DominationCertificate& cert) {
  json j;
  j["T"] = matrix_to_json(cert.T);
  j["A"] = matrix_to_json(cert.A);
  json spec = json::array();
  for (Eigen::Index i = 0; i < cert.spectrum_T.size(); ++i)
    spec.push_back(cert.spectrum_T(i));
  j["spectrumT"] = std::move(spec);
  j["residuals"] = {{"commutant", cert.commutant_residual},
                    {"reconstruction", cert.reconstruction_residual}};
  j["lambda"] = cert.lambda ? complex_to_json(*cert.lambda) : json(nullptr);
  return j;
}

DominationCertificate certificate_from_json(const json& j) {
  if (!j.is_object() || !j.contains("T") || !j.contains("A"))
    throw MalformedKernelError("certificate: needs \"T\" and \"A\"");
  DominationCertificate cert;
  cert.T = matrix_from_json(j["T"], "certificate T");
  cert.A = matrix_from_json(j["A"], "certificate A");
  if (cert.T.rows() != cert.T.cols() || cert.A.rows() != cert.A.cols() ||
      cert.T.rows() != cert.A.rows())
    throw MalformedKernelError("certificate: T and A must be square, equal");
  if (j.contains("spectrumT") && j["spectrumT"].is_array()) {
    cert.spectrum_T.resize(static_cast<Eigen::Index>(j["spectrumT"].size()));
    for (Eigen::Index i = 0; i < cert.spectrum_T.size(); ++i)
      cert.spectrum_T(i) = j["spectrumT"][i].get<double>();
  }
  if (j.contains("residuals") && j["residuals"].is_object()) {
    const json& res = j["residuals"];
    if (res.contains("commutant"))
      cert.commutant_residual = res["commutant"].get<double>();
    if (res.contains("reconstruction"))
      cert.reconstruction_residual = res["reconstruction"].get<double>();
  }
  if (j.contains("lambda") && !j["lambda"].is_null())
    cert.lambda = complex_from_json(j["lambda"], "certificate lambda");
  return cert;
}

json witness_to_json(const Witness& witness) {
  json entries = json::array();
  // reports carry at most the 10 largest-magnitude coefficients
  const std::size_t shown = std::min<std::size_t>(10, witness.entries.size());
  for (std::size_t e = 0; e < shown; ++e) {
    const WitnessEntry& w = witness.entries[e];
    entries.push_back({{"point", w.point},
                       {"alpha", w.alpha + 1},
                       {"h_index", w.h_index + 1},
                       {"coeff", complex_to_json(w.coeff)}});
  }
  return json{{"eigenvalue", witness.eigenvalue}, {"entries", entries}};
}

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw MalformedKernelError("cannot open file: " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw MalformedKernelError("cannot parse " + path + ": " + e.what());
  }
}

void write_json_file(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw InvalidArgumentError("cannot write file: " + path);
  out << dump_json(j);
}

std::string dump_json(const json& j) { return j.dump(2) + "\n"; }

}  // namespace opk
