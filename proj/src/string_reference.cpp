#include "hyphinf/string_reference.hpp"

namespace hyphinf::reference {
namespace {

Matrix m2(double a, double b, double c, double d) {
  return (Matrix(2, 2) << a, b, c, d).finished();
}

Matrix col2(double a, double b) { return (Matrix(2, 1) << a, b).finished(); }

Matrix row2(double a, double b) { return (Matrix(1, 2) << a, b).finished(); }

Matrix scalar(double a) { return Matrix::Constant(1, 1, a); }

}  // namespace

PrintedStringExample printed_string_example(
    const StringExampleParameters& prm) {
  const double s = prm.sigma;
  const double g = prm.gamma;
  const double rg = std::sqrt(g);
  const double s2 = s * s * g * g;
  const double r = std::sqrt(s2 - 1.0);
  const double aq = prm.a_q;
  const double bq = prm.b_q;
  const double cq = prm.c_q;
  const double at = prm.a_tilde;
  const double bt = prm.b_tilde;

  PrintedStringExample e;
  e.discrete = {m2(0, 1, -1, 0), col2(1 / s, 0),    col2(0, 1),
                row2(0, 2),      row2(2 * s, 0),    scalar(1 / s),
                scalar(0),       scalar(0),         scalar(-s)};
  e.scaled = {m2(0, 1, -1, 0),     col2(1 / (s * rg), 0), col2(0, rg),
              row2(0, 2 / rg),     row2(2 * s * rg, 0),   scalar(1 / (s * g)),
              scalar(0),           scalar(0),             scalar(-s * g)};

  e.Qc = m2(0, 0, 0, 4 / g);
  e.Lc = m2(0, 0, 2 / (s * g * rg), 0);
  e.Rc = m2(1 / (s * s * g * g) - 1, 0, 0, 0);
  e.Qo = m2(1 / (s * s * g), 0, 0, 0);
  e.Lo = m2(1 / (s * s * g * rg), 0, 0, 0);
  e.Ro = m2(1 / (s * s * g * g) - 1, 0, 0, 0);

  e.X = m2(0, 0, 0, 4 * s * s * g / (s2 - 1));
  e.Y = m2(g / (s2 - 1), 0, 0, 0);
  e.a_plus_bf = m2(0, (s * s + 1) / (s * s - 1), 0, 0);

  e.Vc = m2(r / (s * g), 0, 0, 2 * s * g / r);
  e.Vo = e.Vc;
  e.Wc = m2(0, -2 / (rg * r), -2 * s * rg / r, 0);
  e.Wo = m2(-1 / (s * rg * r), 0, 0, -rg / r);

  e.Qx = m2(g / (s2 - 1), 0, 0, 0);
  e.Lx = m2(0, 0, 0, 0);
  e.Rx = m2(-1, 0, 0, 0);
  e.Z = e.Y;
  e.Vx = m2(1, 0, -2 * s * g / (s2 - 1), 2 * s * g / r);
  e.Wx = m2(0, 0, 0, -rg / r);
  e.C2F1 = row2(2 * s * rg, 0);
  e.Sc = s2 / (s2 - 1);
  e.Sx = 1.0;

  const double a12 = (s2 + 1) / (s2 - 1);
  e.sigma_g_scaled = {m2(0, a12, 0, 0),
                      col2(0, 0),
                      col2(0, -r / (2 * s * rg)),
                      row2(0, 0),
                      row2(r / rg, 0),
                      scalar(1 / (2 * s * g)),
                      scalar(r / (2 * s * g)),
                      scalar(r / (2 * s * g)),
                      scalar(0)};
  e.sigma_g = {m2(0, a12, 0, 0),       col2(0, 0),
               col2(0, -r / (2 * s * g)), row2(0, 0),
               row2(r / g, 0),         scalar(1 / (2 * s)),
               scalar(r / (2 * s * g)), scalar(r / (2 * s * g)),
               scalar(0)};
  e.sigma_q = {scalar(aq), scalar(bq), scalar(cq), scalar(0)};

  e.controller.A = (Matrix(3, 3) << 0, a12, 0,                       //
                    0, 0, -cq * r / (2 * s * g),                    //
                    bq * r / g, 0, aq)
                       .finished();
  e.controller.B = (Matrix(3, 1) << 0, 0, bq * r / (2 * s * g)).finished();
  e.controller.C = (Matrix(1, 3) << 0, 0, cq * r / (2 * s * g)).finished();
  e.controller.D = scalar(1 / (2 * s));

  e.controller_opt.A =
      (Matrix(4, 4) << 0, a12, 0, 0,                                     //
       0, 0, -cq * r / (2 * s * g), 0,                                  //
       bq * r / g, 0, aq + bq * cq * (s2 - 1) / (2 * s * g * g), 0,     //
       0, 0, bt * cq * r / (s * g), at)
          .finished();
  e.controller_opt.B =
      (Matrix(4, 1) << 0, 0, bq * r / (s * g), bt / s).finished();
  e.controller_opt.C =
      (Matrix(1, 4) << 0, 0, cq * r / (s * g), 0).finished();
  e.controller_opt.D = scalar(1 / s);

  e.closed_loop.A =
      (Matrix(6, 6) << 0, 1, 0, 0, 0, 0,                                 //
       0, 0, 0, 0, cq * r / (2 * s * g), 0,                             //
       0, 0, 0, a12, 0, 0,                                              //
       0, 0, 0, 0, -cq * r / (2 * s * g), 0,                            //
       bq * r / g, 0, bq * r / g, 0, aq, 0,                             //
       bt, 0, 0, 0, bt * cq * (s2 - 1) / (2 * s * g), at)
          .finished();
  e.closed_loop.B = Matrix::Zero(6, 1);
  e.closed_loop.B(0, 0) = 1 / s;
  e.closed_loop.C = (Matrix(1, 6) << 0, 2, 0, 0, 0, 0).finished();
  e.closed_loop.D = scalar(1 / s);
  e.printed_eigenvalues.resize(6);
  e.printed_eigenvalues << Complex(0.25, 0), Complex(-0.9319, 0),
      Complex(0.2159, 0.5965), Complex(0.2159, -0.5965), Complex(0, 0),
      Complex(0, 0);
  e.sigma_q_ratio = std::abs(bq * cq / (1 + aq));
  return e;
}

Complex printed_closed_loop_transfer(const StringExampleParameters& prm,
                                     Complex z) {
  const double s = prm.sigma;
  const double g = prm.gamma;
  const double s2 = s * s * g * g;
  const double bc = prm.b_q * prm.c_q;
  return 1.0 / s +
         (1.0 / s) * ((s2 - 1) * bc / (s * g * g * z * z * (z - prm.a_q) + bc));
}

}  // namespace hyphinf::reference
