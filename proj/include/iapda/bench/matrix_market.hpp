#ifndef IAPDA_BENCH_MATRIX_MARKET_HPP
#define IAPDA_BENCH_MATRIX_MARKET_HPP

#include <algorithm>
#include <cctype>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "iapda/linear_operator.hpp"
#include "iapda/trace.hpp"

namespace iapda::bench {

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Reads `matrix array real general` (dense, column-major) or
/// `matrix coordinate real general|symmetric` (sparse, 1-based indices).
inline LinearOperator read_matrix_market(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw FormatError("matrix market: empty input");
  std::string banner = line;
  std::transform(banner.begin(), banner.end(), banner.begin(), [](unsigned char c) { return std::tolower(c); });
  std::istringstream hs(banner);
  std::string tag, object, format, field, symmetry;
  hs >> tag >> object >> format >> field >> symmetry;
  if (tag != "%%matrixmarket" || object != "matrix") throw FormatError("matrix market: bad banner '" + line + "'");
  if (field != "real" && field != "integer" && field != "double")
    throw FormatError("matrix market: unsupported field '" + field + "'");
  const bool symmetric = symmetry == "symmetric";
  if (!symmetric && symmetry != "general") throw FormatError("matrix market: unsupported symmetry '" + symmetry + "'");

  do {
    if (!std::getline(in, line)) throw FormatError("matrix market: missing size line");
  } while (line.empty() || line[0] == '%');
  std::istringstream size_line(line);

  if (format == "array") {
    Index rows = 0, cols = 0;
    if (!(size_line >> rows >> cols)) throw FormatError("matrix market: bad array size line");
    Matrix a(rows, cols);
    for (Index j = 0; j < cols; ++j) {
      for (Index i = symmetric ? j : 0; i < rows; ++i) {
        double v;
        if (!(in >> v)) throw FormatError("matrix market: truncated array data");
        a(i, j) = v;
        if (symmetric) a(j, i) = v;
      }
    }
    return LinearOperator(std::move(a));
  }
  if (format == "coordinate") {
    Index rows = 0, cols = 0, nnz = 0;
    if (!(size_line >> rows >> cols >> nnz)) throw FormatError("matrix market: bad coordinate size line");
    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(static_cast<std::size_t>(symmetric ? 2 * nnz : nnz));
    for (Index e = 0; e < nnz; ++e) {
      Index i, j;
      double v;
      if (!(in >> i >> j >> v)) throw FormatError("matrix market: truncated coordinate data");
      if (i < 1 || i > rows || j < 1 || j > cols) throw FormatError("matrix market: index out of range");
      triplets.emplace_back(i - 1, j - 1, v);
      if (symmetric && i != j) triplets.emplace_back(j - 1, i - 1, v);
    }
    SparseMatrix s(rows, cols);
    s.setFromTriplets(triplets.begin(), triplets.end());
    return LinearOperator(std::move(s));
  }
  throw FormatError("matrix market: unsupported format '" + format + "'");
}

inline LinearOperator read_matrix_market(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path);
  return read_matrix_market(in);
}

/// Dense operators are written as `array`, sparse ones as `coordinate`; values at full precision.
inline void write_matrix_market(std::ostream& out, const LinearOperator& op) {
  if (const SparseMatrix* s = op.sparse()) {
    out << "%%MatrixMarket matrix coordinate real general\n";
    out << s->rows() << ' ' << s->cols() << ' ' << s->nonZeros() << '\n';
    for (Index j = 0; j < s->outerSize(); ++j)
      for (SparseMatrix::InnerIterator it(*s, j); it; ++it)
        out << (it.row() + 1) << ' ' << (it.col() + 1) << ' ' << format_double(it.value()) << '\n';
    return;
  }
  const Matrix& a = *op.dense();
  out << "%%MatrixMarket matrix array real general\n";
  out << a.rows() << ' ' << a.cols() << '\n';
  for (Index j = 0; j < a.cols(); ++j)
    for (Index i = 0; i < a.rows(); ++i) out << format_double(a(i, j)) << '\n';
}

inline void write_matrix_market(const std::string& path, const LinearOperator& op) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot open " + path + " for writing");
  write_matrix_market(out, op);
}

}  // namespace iapda::bench

#endif  // IAPDA_BENCH_MATRIX_MARKET_HPP
