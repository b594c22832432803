#pragma once

namespace critwave {

// Small integer power by repeated multiplication; n is tiny everywhere
// this is used (k and fixed combinations of k).
inline double ipow(double x, int n) {
  double out = 1.0;
  for (int i = 0; i < n; ++i) out *= x;
  return out;
}

}  // namespace critwave
