#include "pnest/complexity.hpp"

#include "pnest/errors.hpp"

#include <string>

namespace pnest {

ComplexityBreakdown complexity_breakdown(int n_r, int n_t, int l_c, int l_d, double l_f, int l_w,
                                         double c_m) {
  if (n_r < 1 || n_t < 1 || l_c < 1 || l_d < 0 || !(l_f > 0) || l_w < 0 || !(c_m > 0))
    throw Error(ErrorKind::InvalidGeometry, "complexity inputs must be positive");
  if (l_c != n_t + l_d)
    throw Error(ErrorKind::InvalidGeometry,
                "l_c = " + std::to_string(l_c) + " but n_t + l_d = " + std::to_string(n_t + l_d));
  const double nr = n_r, nt = n_t, lc = l_c, ld = l_d, lf = l_f, lw = l_w;
  const double p = nr + nt - 1.0;
  const double taps = 2.0 * lw + 1.0;
  const double nn = nr * nt;

  ComplexityBreakdown c;
  c.amp_mul = nr * nt * nt / lc + nn / lc;
  c.amp_add = nn * (nt - 1.0) / lc + nn / lc + nn / lf;
  c.wlls_mul = nn / lc + p * nn / lf + nn * p * p / lf + nn * p / lc;
  c.wlls_add = nn * p * p / lf + (nn - 1.0) * p / lc;
  c.wiener_mul = p * nn / lf + taps * p / lc + (taps * taps * taps + taps) / lf + 2.0 * lw / lf;
  c.wiener_add = p * (nn - 1.0) / lf + 2.0 * lw * p / lc + (taps * 2.0 * lw + 2.0 * lw) / lf +
                 2.0 * lw / lf;
  c.hhat_mul = (2.0 * nn - nr) / lc + p * ld / lc + (2.0 * nn - nr) * ld / lc;
  c.hhat_add = nn / lc + p * (1.0 + 2.0 * ld) / lc;
  c.total = c_m * c.mul() + c.add();
  return c;
}

ComplexityBreakdown table_complexity(int n_antennas, int l_w, double c_m) {
  return complexity_breakdown(n_antennas, n_antennas, 10 * n_antennas, 9 * n_antennas, 1e5, l_w,
                              c_m);
}

const std::vector<LiteratureComplexity>& literature_complexity() {
  static const std::vector<LiteratureComplexity> rows = {
      {"EKF", "Nasir et al. 2013", 3.6e2, 3.7e3, 6.8e4},
      {"EKF-EKS", "Nasir et al. 2013", 4.8e2, 5.1e3, 8.1e4},
      {"EKF", "Mehrpouyan et al. 2012", 1.2e3, 5.6e5, 2.8e8},
      {"SPA-MAP", "Krishnan et al. 2015", 5.9e3, 1.0e5, 1.1e7},
      {"Online MAP", "Nasir et al. 2013", 5.1e6, 7.8e7, 1.1e9},
      {"Offline MAP", "Nasir et al. 2013", 1.0e8, 1.5e9, 2.2e10},
  };
  return rows;
}

}  // namespace pnest
