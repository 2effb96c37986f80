#include "point.hpp"

#include <nlohmann/json.hpp>

#include <Eigen/Eigenvalues>
#include <cstdio>
#include <cstring>

namespace sj {

using nlohmann::json;

std::string complex_to_string(cplx v) {
  char buf[80];
  double re = v.real(), im = v.imag();
  if (im == 0.0) {
    std::snprintf(buf, sizeof(buf), "%.17g", re);
  } else if (re == 0.0) {
    std::snprintf(buf, sizeof(buf), "%.17gi", im);
  } else {
    std::snprintf(buf, sizeof(buf), "%.17g%+.17gi", re, im);
  }
  return buf;
}

cplx complex_from_string(const std::string& s0) {
  std::string s;
  for (char c : s0)
    if (!std::isspace(static_cast<unsigned char>(c))) s.push_back(c);
  if (s.empty()) throw invalid_input("empty complex literal");

  // Accept: "a", "bi", "a+bi", "a-bi", with "i", "+i", "-i" meaning b = +-1.
  auto parse_part = [](const std::string& t, bool& is_imag) -> double {
    is_imag = !t.empty() && (t.back() == 'i' || t.back() == 'I');
    std::string num = is_imag ? t.substr(0, t.size() - 1) : t;
    if (is_imag && (num.empty() || num == "+")) return 1.0;
    if (is_imag && num == "-") return -1.0;
    if (num.empty()) throw invalid_input("bad complex literal");
    char* end = nullptr;
    double v = std::strtod(num.c_str(), &end);
    if (end == nullptr || *end != '\0')
      throw invalid_input("bad complex literal: " + num);
    return v;
  };

  // Split at the last '+'/'-' that is not a leading sign and not part of an
  // exponent ("e+05").
  std::size_t split = std::string::npos;
  for (std::size_t i = s.size(); i-- > 1;) {
    char c = s[i];
    if (c != '+' && c != '-') continue;
    char prev = s[i - 1];
    if (prev == 'e' || prev == 'E') continue;
    split = i;
    break;
  }
  double re = 0.0, im = 0.0;
  if (split == std::string::npos) {
    bool ii;
    double v = parse_part(s, ii);
    (ii ? im : re) = v;
  } else {
    bool i1, i2;
    double a = parse_part(s.substr(0, split), i1);
    double b = parse_part(s.substr(split), i2);
    if (i1 == i2) throw invalid_input("bad complex literal: " + s0);
    (i1 ? im : re) = a;
    (i2 ? im : re) = b;
  }
  return {re, im};
}

Point::Point(Mat Z, Mat W, double sym_tol, double pd_tol)
    : n_(static_cast<int>(Z.rows())), m_(static_cast<int>(W.rows())),
      cs_(static_cast<int>(Z.rows()), static_cast<int>(W.rows())) {
  if (Z.cols() != n_) throw invalid_input("Point: Z must be square");
  if (W.cols() != n_) throw invalid_input("Point: W must be m x n");
  if (!approx_symmetric(Z, sym_tol))
    throw invalid_input("Point: Z not symmetric within tolerance");
  Z_ = 0.5 * (Z + Z.transpose().eval());
  W_ = std::move(W);
  X_ = Z_.real();
  Y_ = Z_.imag();
  U_ = W_.real();
  V_ = W_.imag();
  Eigen::SelfAdjointEigenSolver<RMat> es(Y_);
  if (es.info() != Eigen::Success || es.eigenvalues().minCoeff() <= pd_tol)
    throw invalid_input("Point: Im Z not positive definite");
  R_ = Y_.inverse();
  detY_ = Y_.determinant();

  key_.resize(sizeof(double) * static_cast<std::size_t>(2 * n_ * n_ + 2 * m_ * n_));
  char* p = key_.data();
  auto put = [&p](const RMat& M) {
    std::memcpy(p, M.data(), sizeof(double) * static_cast<std::size_t>(M.size()));
    p += sizeof(double) * static_cast<std::size_t>(M.size());
  };
  put(X_);
  put(Y_);
  put(U_);
  put(V_);
}

cplx Point::coord(int c) const {
  bool holo = cs_.is_holo(c);
  cplx v;
  if (cs_.is_z(c)) {
    auto [i, j] = cs_.z_pair(c);
    v = Z_(i, j);
  } else {
    auto [r, s] = cs_.w_pair(c);
    v = W_(r, s);
  }
  return holo ? v : std::conj(v);
}

Point Point::displaced(int holo_coord, cplx dz) const {
  Mat Z = Z_, W = W_;
  if (cs_.is_z(holo_coord)) {
    auto [i, j] = cs_.z_pair(holo_coord);
    Z(i, j) += dz;
    if (i != j) Z(j, i) += dz;
  } else {
    auto [r, s] = cs_.w_pair(holo_coord);
    W(r, s) += dz;
  }
  // Loose tolerances: FD probes may push Y slightly, keep construction honest.
  return Point(Z, W, 1e-9, 1e-12);
}

std::string Point::to_json() const {
  json j;
  j["n"] = n_;
  j["m"] = m_;
  auto dump = [](const RMat& M) {
    std::vector<std::vector<double>> rows;
    for (int i = 0; i < M.rows(); ++i) {
      std::vector<double> r(M.cols());
      for (int c = 0; c < M.cols(); ++c) r[c] = M(i, c);
      rows.push_back(std::move(r));
    }
    return rows;
  };
  j["Z_re"] = dump(X_);
  j["Z_im"] = dump(Y_);
  j["W_re"] = dump(U_);
  j["W_im"] = dump(V_);
  return j.dump();
}

namespace {
RMat load_mat(const json& j, int rows, int cols, const char* what) {
  if (!j.is_array() || static_cast<int>(j.size()) != rows)
    throw invalid_input(std::string("bad matrix in JSON: ") + what);
  RMat M(rows, cols);
  for (int i = 0; i < rows; ++i) {
    if (!j[i].is_array() || static_cast<int>(j[i].size()) != cols)
      throw invalid_input(std::string("bad matrix row in JSON: ") + what);
    for (int c = 0; c < cols; ++c) M(i, c) = j[i][c].get<double>();
  }
  return M;
}
}  // namespace

Point Point::from_json(const std::string& text) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) throw invalid_input("point JSON: parse error");
  // Shorthand for n = m = 1: {"z": "i", "w": "0.2"}.
  if (j.contains("z") && j.contains("w")) {
    cplx z = complex_from_string(j["z"].get<std::string>());
    cplx w = complex_from_string(j["w"].get<std::string>());
    Mat Z(1, 1), W(1, 1);
    Z(0, 0) = z;
    W(0, 0) = w;
    return Point(Z, W);
  }
  if (!j.contains("n") || !j.contains("m"))
    throw invalid_input("point JSON: missing n/m");
  int n = j["n"].get<int>(), m = j["m"].get<int>();
  RMat X = load_mat(j["Z_re"], n, n, "Z_re");
  RMat Y = load_mat(j["Z_im"], n, n, "Z_im");
  RMat U = load_mat(j["W_re"], m, n, "W_re");
  RMat V = load_mat(j["W_im"], m, n, "W_im");
  Mat Z = X.cast<cplx>() + kI * Y.cast<cplx>();
  Mat W = U.cast<cplx>() + kI * V.cast<cplx>();
  return Point(Z, W);
}

Point random_point(int n, int m, std::uint64_t seed) {
  Rng rng(mix_seed(seed, "point"));
  // Y = Q diag(e) Q^t with eigenvalues in [0.7, 2.5] and Q from QR of a
  // random Gaussian matrix.
  RMat G(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) G(i, j) = rng.normal();
  Eigen::HouseholderQR<RMat> qr(G);
  RMat Q = qr.householderQ();
  RMat Y = RMat::Zero(n, n);
  for (int i = 0; i < n; ++i) Y(i, i) = rng.unif(0.7, 2.5);
  Y = (Q * Y * Q.transpose()).eval();
  Y = 0.5 * (Y + Y.transpose().eval());

  RMat X(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) X(i, j) = X(j, i) = rng.unif(-1.0, 1.0);

  RMat U(m, n), V(m, n);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) {
      U(i, j) = rng.unif(-0.35, 0.35);
      V(i, j) = rng.unif(-0.35, 0.35);
    }
  Mat Z = X.cast<cplx>() + kI * Y.cast<cplx>();
  Mat W = U.cast<cplx>() + kI * V.cast<cplx>();
  return Point(Z, W);
}

}  // namespace sj
