#include "freespec/freemoments.hpp"

#include <cmath>

namespace freespec {

namespace {

// Span DP: count(i,j) = non-crossing matchings of positions i..j pairing
// equal letters. Pairing position i with p splits the span into two
// independent spans, which is exactly the non-crossing condition.
double count_span(const NCWord& w, int i, int j, std::vector<double>& memo, int len) {
  if (i > j) return 1.0;
  if (((j - i) & 1) == 0) return 0.0;
  double& slot = memo[static_cast<size_t>(i) * len + j];
  if (slot >= 0.0) return slot;
  double total = 0.0;
  for (int p = i + 1; p <= j; p += 2)
    if (w[p] == w[i])
      total += count_span(w, i + 1, p - 1, memo, len) * count_span(w, p + 1, j, memo, len);
  slot = total;
  return total;
}

}  // namespace

double word_trace(const NCWord& w) {
  if (w.empty()) return 1.0;
  if (w.size() % 2 != 0) return 0.0;
  int len = static_cast<int>(w.size());
  std::vector<double> memo(static_cast<size_t>(len) * len, -1.0);
  return count_span(w, 0, len - 1, memo, len);
}

double poly_moment(const MatrixNCPoly& p, int j, size_t term_guard) {
  if (p.m() != p.m_prime()) throw config_error("poly_moment: polynomial must be square");
  if (j < 0) throw config_error("poly_moment: order must be nonnegative");
  if (j == 0) return 1.0;
  MatrixNCPoly power = p;
  for (int step = 1; step < j; ++step) {
    power = multiply(power, p);
    if (power.terms().size() > term_guard)
      throw numeric_error("poly_moment: expansion exceeds " + std::to_string(term_guard) +
                          " terms");
  }
  cdouble acc = 0.0;
  for (const auto& [w, c] : power.terms()) {
    double wt = word_trace(w);
    if (wt != 0.0) acc += c.trace() / static_cast<double>(p.m()) * wt;
  }
  double scale = std::max(1.0, std::abs(acc));
  if (std::abs(acc.imag()) > 1e-10 * scale)
    throw numeric_error("poly_moment: non-real moment, imag = " + std::to_string(acc.imag()));
  return acc.real();
}

}  // namespace freespec
