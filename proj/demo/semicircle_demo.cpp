// Samples one Wigner matrix with Pareto entries, truncates it, and prints
// how far each spectrum sits from the semicircle law.
#include <wigner/wigner.hpp>

#include <cstdio>

int main() {
  using namespace wigner;
  const std::size_t n = 400;
  const auto law = EntryLaw::pareto(5.1);
  const auto w = sample_wigner({n, law, 2024});
  const auto t = truncate(w, TruncationSpec{}, law);

  for (const auto& [name, m] : {std::pair{"raw", &w}, std::pair{"truncated", &t.breve}}) {
    const auto s = decompose(*m);
    const auto sum = summarize(s);
    std::printf("%-10s lambda_max=%.4f  delta_star=%.4f  t_stat=%.4f  zeta=%.4f  v_stat=%.4f\n", name,
                s.lambda_max(), sum.delta_star, sum.t_stat, sum.zeta, sum.v_stat);
  }
  std::printf("clipped entries: %zu, cutoff %.4f\n", t.clipped, t.cutoff);

  const ComplexPoint z(0.5, 0.1);
  const auto s = decompose(t.breve);
  const auto empirical = m_n(s, z), limit = stieltjes_s(z);
  std::printf("at z = 0.5 + 0.1i: m_n = %.5f%+.5fi, s = %.5f%+.5fi\n", empirical.real(), empirical.imag(),
              limit.real(), limit.imag());
}
