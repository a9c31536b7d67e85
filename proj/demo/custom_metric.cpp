// Checks a user-supplied phi(t, s) at a few points and integrates one geodesic.
//   custom_metric "(1+s)^2/(1+t)"

#include <cstdio>
#include <exception>

#include "ufinsler/ufinsler.hpp"

using namespace ufinsler;

int main(int argc, char** argv) {
  const char* source = argc > 1 ? argv[1] : "(1+s)^2/(1+t)";
  try {
    const MetricDefn m = resolve_metric(source);
    std::printf("phi(t,s) = %s\n\n", print(m.body).c_str());
    std::printf("%6s %6s %12s %12s %12s %8s\n", "t", "s", "k1", "ktilde", "K_F", "convex");
    for (double t : {0.1, 0.4, 0.8}) {
      for (double ratio : {0.0, 0.5, 1.0}) {
        const double s = t * ratio;
        const ConvexityReport rep = convexity_report(m, t, s, 3);
        const double k = holomorphic_curvature(m, t, s).K_F + 0.0;  // no "-0.000000"
        std::printf("%6.2f %6.2f %12.6f %12.6f %12.6f %8s\n", t, s, rep.k1, rep.k_tilde, k,
                    to_string(rep.convex));
      }
    }

    CVector z(2), v(2);
    z << Complex(0.3, 0.0), Complex(0.0, 0.2);
    v << Complex(0.1, 0.4), Complex(-0.2, 0.0);
    const PointDirection p(z, v);
    const GeodesicTrace tr = integrate_geodesic(m, p.x(), p.u(), 1e-3, 1000);
    const auto& end = tr.points.back();
    std::printf("\ngeodesic from z = (0.3, 0.2i): F(0) = %.15f, F(1) = %.15f\n", tr.points.front().F, end.F);
    std::printf("endpoint z = (%.6f%+.6fi, %.6f%+.6fi)\n", end.x[0], end.x[2], end.x[1], end.x[3]);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return 1;
  }
}
