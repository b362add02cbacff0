#include <catch_amalgamated.hpp>

#include <swarm_mimo/polarization.hpp>
#include <swarm_mimo/sampling.hpp>

using namespace swarm_mimo;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

Vec3 random_direction(Rng &rng, double d = 10.0) {
  return sample_shell_position({d, d}, rng).to_cartesian();
}

const OrientationRanges wide{{-pi / 2, pi / 2}, {-pi / 2, pi / 2}, {0, two_pi}};

// Four-term expansion of h for unrotated antennas, written from the closed form of T.
cplx expanded_h(const Vec3 &r, const AntennaConfig &tx, const AntennaConfig &rx) {
  const double d = r.norm();
  const double rxy = std::hypot(r.x, r.y), rxz = std::hypot(r.x, r.z);
  const double t11 = rxy / d, t12 = -r.y * r.z / (rxy * d);
  const double t21 = -r.y * r.z / (rxz * d), t22 = rxz / d;
  const double th = std::acos(r.z / d), ps = std::acos(r.y / d);
  const double th_r = std::acos(-r.z / d), ps_r = std::acos(-r.y / d);
  const cplx a = std::conj(tx.excitation.theta_feed()) * field_pattern(th, tx.dipole);
  const cplx b = std::conj(tx.excitation.psi_feed()) * field_pattern(ps, tx.dipole);
  const cplx c = rx.excitation.theta_feed() * field_pattern(th_r, rx.dipole);
  const cplx e = rx.excitation.psi_feed() * field_pattern(ps_r, rx.dipole);
  return std::sqrt(tx.dipole.gain * rx.dipole.gain) *
         (a * t11 * c + a * t12 * e + b * t21 * c + b * t22 * e);
}

} // namespace

TEST_CASE("half-wave field pattern") {
  const DipoleGeometry dip;
  CHECK_THAT(field_pattern(pi / 2, dip), WithinAbs(1.0, 1e-15));
  CHECK(field_pattern(0.0, dip) == 0.0);
  CHECK(field_pattern(pi, dip) == 0.0);
  CHECK_THAT(field_pattern(1e-6, dip), WithinAbs(0.0, 1e-5));
  // cos(pi/2 cos t)/sin t at t = pi/4
  CHECK_THAT(field_pattern(pi / 4, dip),
             WithinRel(std::cos(pi / 2 * std::cos(pi / 4)) / std::sin(pi / 4), 1e-14));
  // small-angle series: F ~ (pi/4) t
  CHECK_THAT(field_pattern(1e-3, dip), WithinRel(pi / 4 * 1e-3, 1e-5));
  for (int i = 1; i < 100; ++i) {
    const double t = pi * i / 100;
    CHECK_THAT(field_pattern(t, dip), WithinAbs(field_pattern(pi - t, dip), 1e-14));
  }
  CHECK_THROWS_AS(field_pattern(1.0, dip, -1.0), DomainError);
}

TEST_CASE("polarization basis") {
  const auto b = polarization_basis({1, 0, 0});
  CHECK_THAT(b.theta_hat.z, WithinAbs(1.0, 1e-15));
  CHECK_THAT(b.psi_hat.y, WithinAbs(1.0, 1e-15));
  CHECK_THAT(b.p_hat.x, WithinAbs(1.0, 1e-15));
  CHECK_THROWS_AS(polarization_basis({0, 0, 5}), SingularDirectionError);
  CHECK_THROWS_AS(polarization_basis({0, 3, 0}), SingularDirectionError);

  Rng rng = substream(1, 1);
  for (int i = 0; i < 1000; ++i) {
    const auto q = polarization_basis(random_direction(rng));
    CHECK_THAT(q.theta_hat.norm(), WithinAbs(1.0, 1e-12));
    CHECK_THAT(q.psi_hat.norm(), WithinAbs(1.0, 1e-12));
    CHECK_THAT(q.theta_hat.dot(q.p_hat), WithinAbs(0.0, 1e-12));
    CHECK_THAT(q.psi_hat.dot(q.p_hat), WithinAbs(0.0, 1e-12));
    CHECK(q.theta_hat.z >= 0.0);
  }
}

TEST_CASE("T matrix") {
  const RotationMatrix I;
  const Mat2 t0 = t_matrix({7, 0, 0}, I, I);
  CHECK_THAT(t0[0][0], WithinAbs(1.0, 1e-15));
  CHECK_THAT(t0[0][1], WithinAbs(0.0, 1e-15));
  CHECK_THAT(t0[1][0], WithinAbs(0.0, 1e-15));
  CHECK_THAT(t0[1][1], WithinAbs(1.0, 1e-15));

  Rng rng = substream(2, 2);
  double worst = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const Vec3 r = random_direction(rng, 1.0 + 100.0 * std::uniform_real_distribution<>(0, 1)(rng));
    const double d = r.norm(), rxy = std::hypot(r.x, r.y), rxz = std::hypot(r.x, r.z);
    const Mat2 t = t_matrix(r, I, I);
    worst = std::max({worst, std::abs(t[0][0] - rxy / d), std::abs(t[0][1] + r.y * r.z / (rxy * d)),
                      std::abs(t[1][0] + r.y * r.z / (rxz * d)), std::abs(t[1][1] - rxz / d)});
  }
  CHECK(worst < 1e-12);

  for (int i = 0; i < 1000; ++i) {
    const RotationMatrix rt = rotation_matrix(sample_orientation(wide, rng));
    const RotationMatrix rr = rotation_matrix(sample_orientation(wide, rng));
    const Vec3 r = random_direction(rng);
    const Mat2 t = t_matrix(r, rt, rr);
    const auto b = polarization_basis(rt.transpose() * r);
    const Vec3 th = rt * b.theta_hat, ps = rt * b.psi_hat;
    CHECK_THAT(t[0][0], WithinAbs(th.dot(rr.column(2)), 1e-12));
    CHECK_THAT(t[0][1], WithinAbs(th.dot(rr.column(1)), 1e-12));
    CHECK_THAT(t[1][0], WithinAbs(ps.dot(rr.column(2)), 1e-12));
    CHECK_THAT(t[1][1], WithinAbs(ps.dot(rr.column(1)), 1e-12));
    for (auto &row : t)
      for (double v : row) CHECK(std::abs(v) <= 1.0 + 1e-12);
  }
}

TEST_CASE("channel factor reference cases") {
  AntennaConfig lin;
  SECTION("co-polarized boresight") {
    const auto r = channel_factor(lin, lin, {50, 0, 0}, 2.4e9);
    CHECK_THAT(r.h.real(), WithinAbs(1.643, 1e-12));
    CHECK_THAT(r.h.imag(), WithinAbs(0.0, 1e-12));
    CHECK_THAT(r.plf, WithinAbs(1.0, 1e-12));
  }
  SECTION("circular to linear loses half") {
    AntennaConfig circ;
    circ.excitation = DipoleExcitation::from_complex(M_SQRT1_2, cplx(0, M_SQRT1_2));
    const auto r = channel_factor(circ, lin, {50, 0, 0}, 2.4e9);
    CHECK_THAT(r.plf, WithinAbs(0.5, 1e-12));
  }
  SECTION("unrotated frames match the four-term expansion") {
    Rng rng = substream(3, 3);
    AntennaConfig tx, rx;
    for (int i = 0; i < 2000; ++i) {
      tx.excitation = DipoleExcitation::from_complex(complex_gaussian(rng), complex_gaussian(rng));
      rx.excitation = DipoleExcitation::from_complex(complex_gaussian(rng), complex_gaussian(rng));
      const Vec3 r = random_direction(rng);
      const cplx h = channel_factor(tx, rx, r, 2.4e9).h;
      const cplx want = expanded_h(r, tx, rx);
      CHECK(std::abs(h - want) <= 1e-12 * (1.0 + std::abs(want)));
    }
  }
}

TEST_CASE("channel factor properties") {
  Rng rng = substream(4, 4);
  AntennaConfig tx, rx;
  int bad_plf = 0, bad_chi = 0, bad_cov = 0;
  for (int i = 0; i < 100000; ++i) {
    tx.excitation = DipoleExcitation::from_complex(complex_gaussian(rng), complex_gaussian(rng));
    rx.excitation = DipoleExcitation::from_complex(complex_gaussian(rng), complex_gaussian(rng));
    tx.orientation = sample_orientation(wide, rng);
    rx.orientation = sample_orientation(wide, rng);
    const PreparedAntenna pt(tx), pr(rx);
    const Vec3 r = random_direction(rng);
    PolarizationResult res;
    try {
      res = channel_factor(pt, pr, r);
    } catch (const SingularDirectionError &) {
      continue;
    }
    bad_plf += !(res.plf >= 0.0 && res.plf <= 1.0);
    bad_chi += res.chi != std::norm(res.h);
    if (i % 10 == 0) {
      // the same rigid rotation applied to both antennas and the geometry
      const RotationMatrix q = rotation_matrix(sample_orientation(wide, rng));
      PreparedAntenna qt = pt, qr = pr;
      qt.rot = q * pt.rot;
      qr.rot = q * pr.rot;
      const double h2 = std::abs(channel_factor(qt, qr, q * r).h);
      bad_cov += std::abs(h2 - std::abs(res.h)) > 1e-10;
    }
  }
  CHECK(bad_plf == 0);
  CHECK(bad_chi == 0);
  CHECK(bad_cov == 0);

  AntennaConfig dead;
  dead.excitation = {0.0, 0.0, 0.0, 0.0};
  CHECK_THROWS_AS(channel_factor(dead, rx, {5, 1, 1}, 2.4e9), DomainError);
}

TEST_CASE("chi equals the gain product times the raw projection") {
  AntennaConfig tx, rx;
  tx.excitation = DipoleExcitation::circular_gs();
  rx.excitation = DipoleExcitation::circular_uav();
  rx.orientation = {0.3, -0.2, 1.0};
  const Vec3 r{3, 4, 5};
  const auto g = channel_factor(tx, rx, r, 2.4e9);
  AntennaConfig t1 = tx, r1 = rx;
  t1.dipole.gain = r1.dipole.gain = 1.0;
  const auto u = channel_factor(t1, r1, r, 2.4e9);
  CHECK_THAT(g.chi, WithinRel(1.643 * 1.643 * std::norm(u.h), 1e-14));
  CHECK_THAT(g.plf, WithinRel(u.plf, 1e-14));
}

TEST_CASE("array gain profile") {
  AntennaConfig base;
  base.excitation = DipoleExcitation::circular_gs();
  AntennaConfig uav;
  uav.excitation = DipoleExcitation::circular_uav();
  uav.orientation = {0.2, 0.1, 0.4};
  const Vec3 pos = SphericalPosition{300.0, 1.0, 2.0}.to_cartesian();

  SECTION("single element reduces to the channel factor") {
    const ArrayGeometry g{1, 1, 0.0, 0.0};
    const auto p = effective_gain_array(g, {base}, pos, uav, 2.4e9);
    CHECK_THAT(p.mean, WithinRel(channel_factor(base, uav, pos, 2.4e9).chi, 1e-14));
  }
  SECTION("identical elements in the plane-wave regime") {
    const ArrayGeometry g{16, 1, 0.0625, 0.0};
    const auto cfgs = make_gs_configs(g, base, false, {}, 1);
    const auto p = effective_gain_array(g, cfgs, pos, uav, 2.4e9);
    for (double c : p.chi) CHECK_THAT(c, WithinRel(p.chi[0], 0.01));
  }
  SECTION("pseudo-random orientations, mean gain near -8 dB") {
    const ArrayGeometry g{100, 1, 0.0625, 0.0};
    const auto cfgs = make_gs_configs(g, base, true, {}, 7);
    AntennaConfig u;
    u.excitation = DipoleExcitation::circular_uav();
    const Vec3 p = SphericalPosition{100.0, pi / 3, pi}.to_cartesian();
    const double db = linear_to_db(effective_gain_array(g, cfgs, p, u, 2.4e9).mean);
    CHECK(db > -11.0);
    CHECK(db < -5.0);
  }
  SECTION("mismatched sizes") {
    const ArrayGeometry g{4, 1, 0.1, 0.0};
    CHECK_THROWS_AS(effective_gain_array(g, {base}, pos, uav, 2.4e9), DimensionError);
  }
}

TEST_CASE("worst case gain and kappa") {
  const ArrayGeometry one{1, 1, 0.0, 0.0};
  AntennaConfig unit;
  unit.model = ElementModel::unit_gain;
  const ShellRegion reg{20.0, 500.0};
  SearchBudget budget;
  budget.samples = 10000;
  budget.refine_iterations = 50;
  CHECK(worst_case_gain(one, {unit}, unit, reg, budget).chi_wc == 1.0);
  CHECK(kappa_estimate(one, {unit}, unit, reg, 10000, 3).kappa == 1.0);
  budget.samples = 100;
  CHECK_THROWS_AS(worst_case_gain(one, {unit}, unit, reg, budget), DomainError);
  CHECK_THROWS_AS(kappa_estimate(one, {unit}, unit, reg, 10, 3), DomainError);

  SECTION("search is deterministic and bounds kappa") {
    const ArrayGeometry g{8, 1, 0.0625, 0.0};
    AntennaConfig gs;
    gs.excitation = DipoleExcitation::circular_gs();
    AntennaConfig uav;
    uav.excitation = DipoleExcitation::circular_uav();
    const auto cfgs = make_gs_configs(g, gs, true, {}, 7);
    SearchBudget b;
    b.samples = 10000;
    b.refine_top = 3;
    b.refine_iterations = 100;
    const auto w1 = worst_case_gain(g, cfgs, uav, reg, b);
    const auto w2 = worst_case_gain(g, cfgs, uav, reg, b);
    CHECK(w1.chi_wc == w2.chi_wc);
    CHECK(w1.chi_wc > 0.0);
    const auto k = kappa_estimate(g, cfgs, uav, reg, 20000, 5);
    CHECK(k.kappa * w1.chi_wc <= 1.0);
  }
  SECTION("kappa converges for a circular cross-dipole array") {
    const ArrayGeometry g{8, 1, 0.0625, 0.0};
    AntennaConfig gs;
    gs.excitation = DipoleExcitation::circular_gs();
    AntennaConfig uav;
    uav.excitation = DipoleExcitation::circular_uav();
    const auto cfgs = make_gs_configs(g, gs, true, {}, 7);
    const auto k = kappa_estimate(g, cfgs, uav, reg, 1000000, 11, {}, 1e-12);
    REQUIRE(std::isfinite(k.kappa));
    CHECK(k.std_error < 0.02 * k.kappa);
    CHECK(k.n_used + k.n_excluded == 1000000);
  }
}
