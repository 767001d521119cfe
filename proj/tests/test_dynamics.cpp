#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <memory>
#include <numbers>

#include "chemolab/checkpoint.hpp"
#include "chemolab/energy.hpp"
#include "chemolab/errors.hpp"
#include "chemolab/experiments.hpp"
#include "chemolab/integrator.hpp"
#include "chemolab/operators.hpp"
#include "chemolab/semigroup.hpp"
#include "oracles.hpp"

using namespace chemo;
using std::numbers::pi;

namespace {

GridPtr make_grid(double r_max, int cells, int dim = 3) {
    return std::make_shared<RadialGrid>(RadialGrid::uniform(r_max, cells, dim));
}

FieldState gaussian_triple(GridPtr grid, double au, double av, double aw) {
    FieldState s = FieldState::zero(grid);
    s.u = gaussian_field(*grid, au);
    s.v = gaussian_field(*grid, av);
    s.w = gaussian_field(*grid, aw);
    return s;
}

ModelParams unit_params() { return ModelParams{}; }

} // namespace

TEST_CASE("step keeps the zero state fixed") {
    auto grid = make_grid(8.0, 128);
    const FieldState next = step(FieldState::zero(grid), unit_params(), 1e-3);
    for (std::size_t i = 0; i < next.size(); ++i) {
        CHECK(next.u[i] == 0.0);
        CHECK(next.v[i] == 0.0);
        CHECK(next.w[i] == 0.0);
    }
}

TEST_CASE("step conserves the masses of u and v to machine precision") {
    auto grid = make_grid(10.0, 512);
    FieldState s = gaussian_triple(grid, 1.0, 0.5, 0.8);
    const double mu = integrate_radial(s.u, *grid);
    const double mv = integrate_radial(s.v, *grid);
    for (int k = 0; k < 50; ++k)
        s = step(s, unit_params(), 5e-4);
    CHECK(integrate_radial(s.u, *grid) == doctest::Approx(mu).epsilon(1e-12));
    CHECK(integrate_radial(s.v, *grid) == doctest::Approx(mv).epsilon(1e-12));
}

TEST_CASE("diffusion-only evolution tracks the analytic heat kernel") {
    ModelParams params;
    params.chi = params.xi = params.lambda = params.alpha = params.beta = 0.0;
    const double t0 = 0.1, tau = 0.1;
    auto error_with_dt = [&](double dt) {
        auto grid = make_grid(12.0, 2048);
        FieldState s = FieldState::zero(grid);
        s.u = heat_kernel_field(*grid, t0);
        const long steps = static_cast<long>(std::round(tau / dt));
        for (long k = 0; k < steps; ++k)
            s = step(s, params, dt);
        const Field exact = heat_kernel_field(*grid, t0 + tau);
        double err = 0.0;
        for (std::size_t i = 0; i < s.size(); ++i)
            err = std::max(err, std::abs(s.u[i] - exact[i]));
        return err;
    };
    const double e1 = error_with_dt(4e-4);
    const double e2 = error_with_dt(2e-4);
    CHECK(e1 < 4e-3);
    CHECK(e1 / e2 >= 1.7); // first-order splitting
}

TEST_CASE("diffusion stays consistent at the origin in five dimensions") {
    ModelParams params;
    params.chi = params.xi = params.lambda = params.alpha = params.beta = 0.0;
    params.dim = 5;
    auto grid = std::make_shared<RadialGrid>(RadialGrid::uniform(10.0, 1024, 5));
    const double t0 = 0.1, tau = 0.05, dt = 1e-4;
    FieldState s = FieldState::zero(grid);
    s.u = heat_kernel_field(*grid, t0);
    for (long k = 0; k < static_cast<long>(std::round(tau / dt)); ++k)
        s = step(s, params, dt);
    const Field exact = heat_kernel_field(*grid, t0 + tau);
    double err = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i)
        err = std::max(err, std::abs(s.u[i] - exact[i]));
    // the kernel peak sits at the origin, so an origin-inconsistent stencil
    // would show up here at O(1)
    CHECK(err < 5e-4);
}

TEST_CASE("implicit diffusion preserves nonnegativity") {
    const RadialGrid g = RadialGrid::geometric(10.0, 400, 3, 0.99);
    Field f(g.size());
    for (std::size_t i = 0; i < g.size(); ++i)
        f[i] = std::max(0.0, std::sin(13.0 * g.node(i))) +
               (i % 7 == 0 ? 0.0 : 1e-3);
    const ImplicitDiffusion solver(g);
    const Field out = solver.solve(f, 5e-3, 0.0);
    for (double x : out)
        CHECK(x >= -1e-15);
}

TEST_CASE("upwind fluxes conserve mass and match the mean for u == 1") {
    const RadialGrid g = RadialGrid::uniform(8.0, 512, 3);
    Field u(g.size()), w(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        u[i] = 1.0 + 0.3 * std::sin(2.0 * g.node(i));
        w[i] = std::exp(-g.node(i) * g.node(i));
    }
    const Field div = chemotaxis_divergence(u, w, g, /*upwind=*/true);
    CHECK(std::abs(integrate_radial(div, g)) < 1e-11);
    const Field ones(g.size(), 1.0);
    const Field a = chemotaxis_divergence(ones, w, g, true);
    const Field b = flux_laplacian(w, g);
    for (std::size_t i = 0; i < g.size(); ++i)
        CHECK(a[i] == b[i]);
}

TEST_CASE("suggest_dt follows the CFL formula") {
    auto grid = make_grid(8.0, 256);
    StepControl control;
    control.dt_min = 1e-9;
    control.dt_max = 1e-2;
    SUBCASE("zero advection speed gives dt_max") {
        FieldState s = FieldState::zero(grid);
        s.u = gaussian_field(*grid, 1.0);
        CHECK(suggest_dt(s, unit_params(), control) == control.dt_max);
        ModelParams degenerate;
        degenerate.chi = degenerate.xi = 0.0;
        s.w = gaussian_field(*grid, 5.0);
        CHECK(suggest_dt(s, degenerate, control) == control.dt_max);
    }
    SUBCASE("doubling |w_r| halves the raw suggestion") {
        FieldState s = FieldState::zero(grid);
        s.w = gaussian_field(*grid, 1.0);
        const double d1 = suggest_dt_raw(s, unit_params(), control);
        for (double& x : s.w)
            x *= 2.0;
        const double d2 = suggest_dt_raw(s, unit_params(), control);
        CHECK(d1 == doctest::Approx(2.0 * d2).epsilon(1e-12));
    }
    SUBCASE("the max(chi, xi) branch governs") {
        FieldState s = FieldState::zero(grid);
        s.w = gaussian_field(*grid, 1.0);
        ModelParams p1;
        p1.chi = 2.0;
        p1.xi = 1.0;
        ModelParams p2;
        p2.chi = 2.0;
        p2.xi = 2.0;
        CHECK(suggest_dt_raw(s, p1, control) ==
              doctest::Approx(suggest_dt_raw(s, p2, control)).epsilon(1e-14));
    }
}

TEST_CASE("run_until terminations") {
    SUBCASE("zero data reaches T with all-zero snapshots") {
        auto grid = make_grid(6.0, 64);
        StepControl control;
        RunResult res = run_until(FieldState::zero(grid), unit_params(), 1.0,
                                  control);
        CHECK(res.reason.kind == TerminationReason::Kind::ReachedT);
        for (const auto& rec : res.series.records) {
            CHECK(rec.sup_u == 0.0);
            CHECK(rec.sup_v == 0.0);
            CHECK(rec.sup_w == 0.0);
        }
    }
    SUBCASE("small data decays after an initial transient") {
        auto grid = make_grid(16.0, 256);
        FieldState s = gaussian_triple(grid, 0.01, 0.01, 0.005);
        StepControl control;
        control.dt_max = 2e-3;
        RunOptions opt;
        opt.observe_every = 10;
        RunResult res = run_until(std::move(s), unit_params(), 2.0, control, opt);
        REQUIRE(res.reason.kind == TerminationReason::Kind::ReachedT);
        double early = 0.0, late = 0.0;
        for (const auto& rec : res.series.records) {
            if (rec.t > 0.2 && rec.t <= 1.0)
                early = std::max(early, rec.sup_u);
            if (rec.t > 1.0)
                late = std::max(late, rec.sup_u);
        }
        CHECK(late < early);
    }
    SUBCASE("dt collapse fires when the CFL suggestion dips below dt_min") {
        auto grid = make_grid(8.0, 256);
        FieldState s = gaussian_triple(grid, 0.5, 0.5, 5.0);
        StepControl control;
        control.dt_min = 5e-2;
        control.dt_init = 5e-2;
        control.dt_max = 1e-1;
        RunResult res = run_until(std::move(s), unit_params(), 1.0, control);
        CHECK(res.reason.kind == TerminationReason::Kind::DtCollapse);
    }
    SUBCASE("positivity loss surfaces as scheme failure") {
        auto grid = make_grid(8.0, 64);
        FieldState s = FieldState::zero(grid);
        for (double& x : s.u)
            x = -1.0;
        StepControl control;
        RunResult res = run_until(std::move(s), unit_params(), 1.0, control);
        CHECK(res.reason.kind == TerminationReason::Kind::SchemeFailure);
    }
}

TEST_CASE("the implicit w update satisfies its own discrete equation") {
    auto grid = make_grid(10.0, 256);
    const ModelParams params = unit_params();
    FieldState s = gaussian_triple(grid, 0.7, 0.4, 0.6);
    const double dt = 1e-3;
    const FieldState next = step(s, params, dt);
    const Field lap = flux_laplacian(next.w, *grid);
    for (std::size_t i = 0; i < next.size(); ++i) {
        const double lhs = (next.w[i] - s.w[i]) / dt;
        const double rhs = lap[i] - params.lambda * next.w[i] +
                           params.alpha * next.u[i] + params.beta * next.v[i];
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-9).scale(1.0));
    }
}

TEST_CASE("norm_f tracks the discrete time derivative of w") {
    auto grid = make_grid(12.0, 512);
    const ModelParams params = unit_params();
    FieldState s = gaussian_triple(grid, 0.6, 0.5, 0.4);
    auto discrepancy = [&](double dt) {
        FieldState cur = s;
        for (int k = 0; k < 3; ++k)
            cur = step(cur, params, dt);
        const FieldState next = step(cur, params, dt);
        Field wt(cur.size());
        for (std::size_t i = 0; i < cur.size(); ++i)
            wt[i] = (next.w[i] - cur.w[i]) / dt;
        const EnergyReport e = energy(next, params);
        return std::abs(lp_norm(wt, 2.0, *grid) - e.norm_f);
    };
    // f is built from the flux Laplacian the implicit update inverts, so
    // w_t = -f holds to roundoff, not merely O(dt).
    CHECK(discrepancy(4e-4) < 1e-10);
    CHECK(discrepancy(1e-4) < 1e-10);
}

TEST_CASE("checkpoints round-trip bit-exactly") {
    auto grid = make_grid(9.0, 200);
    FieldState s = gaussian_triple(grid, 1.0, 0.5, 0.25);
    s = step(s, unit_params(), 1e-3);
    GridConfig gspec;
    gspec.r_max = 9.0;
    gspec.nodes = 200;
    gspec.layout = GridLayout::Uniform;
    const std::string path = "checkpoint_test.json";
    save_checkpoint(path, unit_params(), gspec, s);
    const Checkpoint cp = load_checkpoint(path);
    std::filesystem::remove(path);
    CHECK(cp.state.t == s.t);
    REQUIRE(cp.state.u.size() == s.u.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        CHECK(cp.state.u[i] == s.u[i]);
        CHECK(cp.state.v[i] == s.v[i]);
        CHECK(cp.state.w[i] == s.w[i]);
    }
    for (std::size_t i = 0; i < grid->size(); ++i)
        CHECK(cp.state.grid->node(i) == grid->node(i));
}

TEST_CASE("energy report") {
    auto grid = make_grid(12.0, 4096);
    const ModelParams params = unit_params();
    SUBCASE("zero state has all-zero components") {
        const EnergyReport e = energy(FieldState::zero(grid), params);
        CHECK(e.F == 0.0);
        CHECK(e.dirichlet == 0.0);
        CHECK(e.entropy_u == 0.0);
        CHECK(e.D == 0.0);
    }
    SUBCASE("pure-w Gaussian against the quadrature oracle") {
        FieldState s = FieldState::zero(grid);
        s.w = gaussian_field(*grid, 1.0);
        const EnergyReport e = energy(s, params);
        const double l2w_exact = 0.5 * std::pow(pi / 2.0, 1.5);
        CHECK(e.l2w == doctest::Approx(l2w_exact).epsilon(1e-5));
        const double dirichlet_oracle = 0.5 * oracle::radial_integral(
            [](double r) { return 4.0 * r * r * std::exp(-2.0 * r * r); }, 0.0,
            12.0, 3);
        CHECK(e.dirichlet == doctest::Approx(dirichlet_oracle).epsilon(1e-4));
        CHECK(e.coupling == 0.0);
        CHECK(e.F == e.dirichlet + e.l2w);
    }
    SUBCASE("doubling w exactly quadruples dirichlet and l2w") {
        FieldState s = FieldState::zero(grid);
        s.w = gaussian_field(*grid, 1.0);
        const EnergyReport e1 = energy(s, params);
        for (double& x : s.w)
            x *= 2.0;
        const EnergyReport e2 = energy(s, params);
        CHECK(e2.dirichlet == 4.0 * e1.dirichlet);
        CHECK(e2.l2w == 4.0 * e1.l2w);
    }
    SUBCASE("decomposition identity is exact arithmetic") {
        FieldState s = gaussian_triple(grid, 1.3, 0.7, 0.9);
        const EnergyReport e = energy(s, params);
        CHECK(e.F == e.dirichlet + e.l2w - e.coupling + e.entropy_u + e.entropy_v);
        CHECK(e.D >= 0.0);
    }
    SUBCASE("log argument <= 0 is an evaluation error") {
        FieldState s = FieldState::zero(grid);
        s.u[3] = -1.5;
        CHECK_THROWS_AS(energy(s, params), EvaluationError);
    }
}

TEST_CASE("entropy integrand bound (x+1)log(x+1) <= x^2 + x") {
    for (double x = 0.0; x <= 50.0; x += 0.37) {
        CHECK((x + 1.0) * std::log1p(x) <= x * x + x + 1e-12);
    }
}

TEST_CASE("energy inequality margins") {
    SUBCASE("stationary zero state holds with zero margin") {
        EnergyReport a, b;
        b.t = 0.1;
        const InequalityCheck c = check_energy_inequality(a, b, 0.1, unit_params(),
                                                           0.0);
        CHECK(c.holds);
        CHECK(c.margin == 0.0);
    }
    SUBCASE("pure diffusion of w dissipates with positive margin") {
        ModelParams params;
        params.chi = params.xi = params.alpha = params.beta = 0.0;
        params.lambda = 0.0;
        auto grid = make_grid(12.0, 512);
        FieldState s = FieldState::zero(grid);
        s.w = gaussian_field(*grid, 1.0);
        const double dt = 1e-4;
        EnergyReport prev = energy(s, params);
        for (int k = 0; k < 20; ++k) {
            s = step(s, params, dt);
            const EnergyReport cur = energy(s, params);
            const InequalityCheck c =
                check_energy_inequality(prev, cur, dt, params, 0.0);
            CHECK(c.margin >= 0.0);
            prev = cur;
        }
    }
    SUBCASE("integral form holds along a smooth full-model run") {
        auto grid = make_grid(14.0, 512);
        FieldState s = gaussian_triple(grid, 0.8, 0.6, 0.4);
        const ModelParams params = unit_params();
        StepControl control;
        control.dt_max = 1e-4;
        std::vector<EnergyReport> reports;
        RunOptions opt;
        opt.observe_every = 5;
        opt.observers.push_back([&](const FieldState& st, const StepRecord&) {
            reports.push_back(energy(st, params));
        });
        run_until(std::move(s), params, 0.05, control, opt);
        const InequalityCheck c =
            check_energy_inequality_integral(reports, params, 50.0);
        CHECK(c.holds);
    }
}

TEST_CASE("pointwise bound probe") {
    auto grid = make_grid(10.0, 2048);
    SUBCASE("zero w: margin zero at the conventional anchor") {
        const FieldState s = FieldState::zero(grid);
        const ProbeReport p = pointwise_bound_probe(s, InitialDataSummary{});
        CHECK(p.r0 == 1.5);
        CHECK(p.pointwise_margin == 0.0);
    }
    SUBCASE("Gaussian w: anchor solves the mean-value equation, chain slack") {
        FieldState s = FieldState::zero(grid);
        s.w = gaussian_field(*grid, 1.0);
        const InitialDataSummary summary = summarize_initial(s);
        const ProbeReport p = pointwise_bound_probe(s, summary);
        CHECK(p.mean_value_root_found);
        CHECK(p.r0 >= 1.0);
        CHECK(p.r0 <= 2.0);
        const double g_r0 = std::pow(p.r0, 2) * p.w_at_r0;
        CHECK(g_r0 == doctest::Approx(p.interval_mass).epsilon(1e-4));
        // int_1^2 r^{N-1} w dr <= K / |dB_1|
        CHECK(p.interval_mass <= summary.K / unit_sphere_area(3));
        CHECK(p.pointwise_margin <= p.interp_tolerance);
        // monotone nonincreasing w is slack beyond r0
        CHECK(p.pointwise_margin <= 1e-6);
    }
}

TEST_CASE("coupling estimate probe") {
    auto grid = make_grid(10.0, 1024);
    const ModelParams params = unit_params();
    SUBCASE("zero state yields zero ratios by convention") {
        const ProbeReport p = coupling_estimate_probe(FieldState::zero(grid),
                                                      params, InitialDataSummary{});
        for (const auto& [key, value] : p.fitted_ratios)
            CHECK(value == 0.0);
    }
    SUBCASE("generic state: quantities finite, ratios positive and bounded") {
        FieldState s = gaussian_triple(grid, 1.0, 0.8, 0.6);
        const InitialDataSummary summary = summarize_initial(s);
        const ProbeReport p = coupling_estimate_probe(s, params, summary, 0.75);
        CHECK(p.coupling_lhs > 0.0);
        CHECK(p.ball_grad > 0.0);
        CHECK(p.r0_estimate <= 1.0);
        for (const auto& key : {"coupling_gn", "annulus", "ball_gronwall",
                                "combined_ehrling", "gronwall_r"}) {
            REQUIRE(p.fitted_ratios.count(key) == 1);
            CHECK(std::isfinite(p.fitted_ratios.at(key)));
            CHECK(p.fitted_ratios.at(key) >= 0.0);
        }
    }
    SUBCASE("theta and alpha_exp are validated") {
        FieldState s = gaussian_triple(grid, 1.0, 1.0, 1.0);
        const InitialDataSummary summary = summarize_initial(s);
        CHECK_THROWS_AS(coupling_estimate_probe(s, params, summary, 0.4),
                        ConfigError);
        CHECK_THROWS_AS(coupling_estimate_probe(s, params, summary, 0.75, 5.0),
                        ConfigError);
    }
}

TEST_CASE("heat semigroup") {
    auto grid = make_grid(12.0, 1024);
    SUBCASE("t = 0 is the identity") {
        const Field f = gaussian_field(*grid, 1.0);
        const Field g = heat_semigroup(f, 0.0, *grid);
        for (std::size_t i = 0; i < f.size(); ++i)
            CHECK(g[i] == f[i]);
    }
    SUBCASE("heat-kernel self-similarity within 1e-4") {
        const double t0 = 0.1, t = 0.05;
        const Field f = heat_kernel_field(*grid, t0);
        const Field g = heat_semigroup(f, t, *grid);
        const Field exact = heat_kernel_field(*grid, t0 + t);
        double err = 0.0;
        for (std::size_t i = 0; i < f.size(); ++i)
            err = std::max(err, std::abs(g[i] - exact[i]));
        CHECK(err < 1e-4);
    }
    SUBCASE("damping is the exact scalar factor") {
        const Field f = gaussian_field(*grid, 1.0);
        const double t = 0.02, lambda = 1.7;
        const Field damped = heat_semigroup(f, t, *grid, lambda);
        const Field undamped = heat_semigroup(f, t, *grid, 0.0);
        const double factor = std::exp(-lambda * t);
        for (std::size_t i = 0; i < f.size(); ++i)
            CHECK(damped[i] == factor * undamped[i]);
    }
    SUBCASE("mass preserving and sup non-expansive at zero damping") {
        const Field f = gaussian_field(*grid, 2.0);
        const Field g = heat_semigroup(f, 0.05, *grid);
        CHECK(integrate_radial(g, *grid) ==
              doctest::Approx(integrate_radial(f, *grid)).epsilon(1e-12));
        CHECK(sup_norm(g) <= sup_norm(f) * (1.0 + 1e-12));
    }
    SUBCASE("semigroup composition property") {
        const Field f = gaussian_field(*grid, 1.0);
        const Field a = heat_semigroup(heat_semigroup(f, 0.02, *grid), 0.03, *grid);
        const Field b = heat_semigroup(f, 0.05, *grid);
        for (std::size_t i = 0; i < f.size(); ++i)
            CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-6).scale(1.0));
    }
}

TEST_CASE("gamma integral") {
    CHECK(gamma_integral(1.0) == doctest::Approx(std::sqrt(pi)).epsilon(1e-12));
    CHECK(gamma_integral(4.0) ==
          doctest::Approx(0.5 * std::sqrt(pi)).epsilon(1e-12));
    for (double lam : {0.5, 1.0, 2.0}) {
        const GammaIntegral g = gamma_integral_both(lam);
        CHECK(std::abs(g.quadrature - g.closed_form) <= 1e-8 * g.closed_form);
    }
    CHECK_THROWS_AS(gamma_integral(0.0), ConfigError);
}

TEST_CASE("picard iteration") {
    auto grid = make_grid(8.0, 128);
    const ModelParams params = unit_params();
    const Field u0 = gaussian_field(*grid, 0.05);
    const Field v0 = gaussian_field(*grid, 0.05);
    const Field w0 = gaussian_field(*grid, 0.05);
    SUBCASE("zero iterations: pure semigroup evolution") {
        const double T = 0.004;
        const PicardResult r = picard_iterate(u0, v0, w0, T, 0, params, *grid);
        const Field eu = heat_semigroup(u0, T, *grid);
        const Field ew = heat_semigroup(w0, T, *grid, params.lambda);
        for (std::size_t i = 0; i < u0.size(); ++i) {
            CHECK(r.u[i] == eu[i]);
            CHECK(r.w[i] == ew[i]);
        }
        CHECK(r.residuals.empty());
    }
    SUBCASE("residuals contract for small T") {
        const PicardResult r = picard_iterate(u0, v0, w0, 0.004, 5, params, *grid);
        REQUIRE(r.residuals.size() == 5);
        for (std::size_t k = 1; k < r.residuals.size(); ++k)
            CHECK(r.residuals[k] < r.residuals[k - 1]);
        CHECK(r.residuals[2] / r.residuals[0] < 0.25);
    }
    SUBCASE("matches the IMEX integrator on small smooth data") {
        const double T = 0.004;
        FieldState s = FieldState::zero(grid);
        s.u = u0;
        s.v = v0;
        s.w = w0;
        StepControl control;
        control.dt_init = control.dt_max = 2e-6;
        control.dt_min = 1e-9;
        RunResult run = run_until(std::move(s), params, T, control);
        REQUIRE(run.reason.kind == TerminationReason::Kind::ReachedT);
        const PicardResult r = picard_iterate(u0, v0, w0, T, 6, params, *grid);
        double diff = 0.0;
        for (std::size_t i = 0; i < u0.size(); ++i) {
            diff = std::max(diff, std::abs(r.u[i] - run.final_state.u[i]));
            diff = std::max(diff, std::abs(r.w[i] - run.final_state.w[i]));
        }
        CHECK(diff < 1e-4);
    }
}

TEST_CASE("picard iteration reports divergence outside the contraction regime") {
    auto grid = make_grid(6.0, 64);
    ModelParams strong;
    strong.chi = strong.xi = strong.alpha = strong.beta = 40.0;
    const Field u0 = gaussian_field(*grid, 30.0);
    const Field w0 = gaussian_field(*grid, 30.0);
    CHECK_THROWS_WITH_AS(picard_iterate(u0, u0, w0, 0.01, 10, strong, *grid, 8),
                         doctest::Contains("contraction"), EvaluationError);
}

TEST_CASE("L1 bounds report") {
    auto grid = make_grid(12.0, 512);
    ModelParams params;
    params.alpha = params.beta = 0.0; // w decoupled: pure damped diffusion
    FieldState s = FieldState::zero(grid);
    s.w = gaussian_field(*grid, 1.0);
    const InitialDataSummary summary = summarize_initial(s);
    StepControl control;
    control.dt_max = 1e-3;
    RunOptions opt;
    opt.observe_every = 5;
    RunResult run = run_until(std::move(s), params, 0.5, control, opt);
    const L1BoundsReport rep = check_l1_bounds(run.series, summary, params);
    CHECK(rep.bounded);
    CHECK(rep.max_l1_w <= run.series.records.front().l1_w * (1.0 + 1e-10));
    CHECK(rep.structural_slope == doctest::Approx(std::sqrt(pi)).epsilon(1e-12));
}

TEST_CASE("snapshot times are strictly increasing across terminations") {
    auto grid = make_grid(8.0, 256);
    FieldState s = gaussian_triple(grid, 0.5, 0.5, 5.0);
    StepControl control;
    control.dt_min = 5e-2;
    control.dt_init = 5e-2;
    control.dt_max = 1e-1;
    RunOptions opt;
    opt.observe_every = 1;
    RunResult res = run_until(std::move(s), unit_params(), 1.0, control, opt);
    REQUIRE(res.reason.kind == TerminationReason::Kind::DtCollapse);
    for (std::size_t k = 1; k < res.series.records.size(); ++k)
        CHECK(res.series.records[k].t > res.series.records[k - 1].t);
}

TEST_CASE("L1 norms of w stay bounded through a blow-up run") {
    auto grid = std::make_shared<RadialGrid>(
        RadialGrid::geometric_first_cell(12.0, 512, 3, 1e-3));
    FieldState s = FieldState::zero(grid);
    s.u = gaussian_field(*grid, 30.0);
    s.v = gaussian_field(*grid, 30.0);
    s.w = gaussian_field(*grid, 15.0);
    const InitialDataSummary summary = summarize_initial(s);
    StepControl control;
    control.dt_max = 1e-3;
    control.dt_min = 1e-8;
    RunOptions opt;
    opt.observe_every = 20;
    RunResult run = run_until(std::move(s), unit_params(), 1.5, control, opt);
    REQUIRE(run.reason.blew_up());
    CHECK(run.reason.t < 1.0);
    const L1BoundsReport rep = check_l1_bounds(run.series, summary, unit_params());
    CHECK(rep.bounded);
    CHECK(std::isfinite(rep.max_l1_w));
    CHECK(std::isfinite(rep.max_l1_grad_w));
    CHECK(std::isfinite(rep.fitted_slope_w));
}

TEST_CASE("combined estimate uses the 2*theta exponent on |f|_2") {
    auto grid = make_grid(10.0, 512);
    const ModelParams params = unit_params();
    FieldState s = gaussian_triple(grid, 1.0, 0.8, 0.6);
    const InitialDataSummary summary = summarize_initial(s);
    const double theta = 0.75;
    const ProbeReport p = coupling_estimate_probe(s, params, summary, theta);
    const EnergyReport e = energy(s, params);
    const double denom = summary.K * summary.K *
                         (std::pow(e.norm_f, 2.0 * theta) + e.norm_g1 +
                          e.norm_g2 + 1.0);
    CHECK(p.fitted_ratios.at("combined_ehrling") ==
          doctest::Approx(0.5 * e.coupling / denom).epsilon(1e-12));
}

TEST_CASE("detect_blowup mappings") {
    RunResult run;
    run.reason = {TerminationReason::Kind::ReachedT, 2.0, ""};
    CHECK(detect_blowup(run, 2.0).status == BlowupVerdict::Status::GlobalUpTo);
    run.reason = {TerminationReason::Kind::SupNormCap, 0.4, ""};
    const BlowupVerdict v = detect_blowup(run, 2.0);
    CHECK(v.status == BlowupVerdict::Status::BlewUp);
    CHECK(v.trigger == BlowupVerdict::Trigger::SupNormCap);
    CHECK(v.t_star == 0.4);
    run.reason = {TerminationReason::Kind::SchemeFailure, 0.7, "positivity"};
    CHECK(detect_blowup(run, 2.0).status == BlowupVerdict::Status::Inconclusive);
}
