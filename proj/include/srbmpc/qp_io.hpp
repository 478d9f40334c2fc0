#pragma once

#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include "srbmpc/qp.hpp"

namespace srbmpc {

/// Plain-text QP dump, used to capture solver inputs for offline replay.
/// Layout: a version line, a dimensions line, then each matrix as a
/// coordinate list (count followed by `row col value` lines) and each vector
/// as a count followed by one value per line. Values round-trip exactly via
/// max_digits10.
inline void write_qp(std::ostream& out, const QpProblem& p) {
  out << "srbmpc-qp v1\n";
  out << "dims " << p.num_vars() << " " << p.num_eq() << " " << p.num_ineq() << "\n";
  out << std::setprecision(17);
  const auto put_sparse = [&](const char* tag, const SparseMat& m) {
    out << tag << " " << m.nonZeros() << "\n";
    for (int col = 0; col < m.outerSize(); ++col) {
      for (SparseMat::InnerIterator it(m, col); it; ++it) {
        out << it.row() << " " << it.col() << " " << it.value() << "\n";
      }
    }
  };
  const auto put_dense = [&](const char* tag, const VecX& v) {
    out << tag << " " << v.size() << "\n";
    for (Eigen::Index i = 0; i < v.size(); ++i) out << v(i) << "\n";
  };
  put_sparse("H", p.hessian);
  put_dense("g", p.gradient);
  put_sparse("Aeq", p.eq_matrix);
  put_dense("beq", p.eq_rhs);
  put_sparse("Cin", p.ineq_matrix);
  put_dense("din", p.ineq_rhs);
}

inline void write_qp(const std::string& path, const QpProblem& p) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_qp: cannot open " + path);
  write_qp(out, p);
}

inline QpProblem read_qp(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "srbmpc-qp v1") {
    throw std::runtime_error("read_qp: bad or missing version line");
  }
  std::string tag;
  Eigen::Index n = 0, me = 0, mi = 0;
  in >> tag >> n >> me >> mi;
  if (tag != "dims" || !in) throw std::runtime_error("read_qp: bad dims line");

  const auto get_sparse = [&](const char* expect, Eigen::Index rows, Eigen::Index cols) {
    std::string t;
    Eigen::Index nnz = 0;
    in >> t >> nnz;
    if (t != expect || !in) throw std::runtime_error(std::string("read_qp: expected ") + expect);
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(size_t(nnz));
    for (Eigen::Index k = 0; k < nnz; ++k) {
      Eigen::Index r = 0, c = 0;
      double v = 0;
      in >> r >> c >> v;
      if (!in) throw std::runtime_error(std::string("read_qp: truncated ") + expect);
      trips.emplace_back(int(r), int(c), v);
    }
    SparseMat m(rows, cols);
    m.setFromTriplets(trips.begin(), trips.end());
    m.makeCompressed();
    return m;
  };
  const auto get_dense = [&](const char* expect, Eigen::Index size) {
    std::string t;
    Eigen::Index count = 0;
    in >> t >> count;
    if (t != expect || count != size || !in) {
      throw std::runtime_error(std::string("read_qp: expected ") + expect);
    }
    VecX v(size);
    for (Eigen::Index i = 0; i < size; ++i) in >> v(i);
    if (!in && size > 0) throw std::runtime_error(std::string("read_qp: truncated ") + expect);
    return v;
  };

  QpProblem p;
  p.hessian = get_sparse("H", n, n);
  p.gradient = get_dense("g", n);
  p.eq_matrix = get_sparse("Aeq", me, n);
  p.eq_rhs = get_dense("beq", me);
  p.ineq_matrix = get_sparse("Cin", mi, n);
  p.ineq_rhs = get_dense("din", mi);
  p.validate();
  return p;
}

inline QpProblem read_qp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_qp: cannot open " + path);
  return read_qp(in);
}

}  // namespace srbmpc
