#include <hspin/harness.hpp>

#include <CLI11.hpp>

#include <cstdio>
#include <string>
#include <vector>

namespace {

void add_common_flags(CLI::App* sub, hspin::RunConfig& cfg) {
  sub->add_option("--n", cfg.n, "ambient dimension of the hyperbolic space")
      ->capture_default_str();
  sub->add_option("--tau", cfg.tau, "spinor label (full runs every one)")
      ->check(CLI::IsMember({"full", "plus", "minus"}))
      ->capture_default_str();
  sub->add_option("--sigma", cfg.sigma, "boundary label (full runs every one)")
      ->check(CLI::IsMember({"full", "plus", "minus"}))
      ->capture_default_str();
  sub->add_option("--lambda-re", cfg.lambda_re, "spectral parameter, real part")
      ->capture_default_str();
  sub->add_option("--lambda-im", cfg.lambda_im,
                  "spectral parameter, imaginary part")
      ->capture_default_str();
  sub->add_option("--p", cfg.p, "slice norm exponent (0 = default set 2,3,4)")
      ->capture_default_str();
  sub->add_option("--t-min", cfg.t_min, "sweep grid start")
      ->capture_default_str();
  sub->add_option("--t-max", cfg.t_max, "sweep grid end")
      ->capture_default_str();
  sub->add_option("--t-count", cfg.t_count, "sweep grid size")
      ->capture_default_str();
  sub->add_flag("--t-log", cfg.t_log, "geometric grid spacing");
  sub->add_option("--order", cfg.order, "quadrature order")
      ->capture_default_str();
  sub->add_option("--tol", cfg.tol, "override the per-check tolerance")
      ->capture_default_str();
  sub->add_option("--count", cfg.trials, "random trials / datum count")
      ->capture_default_str();
  sub->add_option("--seed", cfg.seed, "seed for randomized checks")
      ->capture_default_str();
  sub->add_option("--out", cfg.out, "report path (default: stdout)");
  sub->add_option("--format", cfg.format, "report format")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
}

struct SubSpec {
  std::string name;
  std::string help;
  hspin::RunConfig cfg;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "numerical checks for the spinor boundary transform on real "
      "hyperbolic space"};
  app.require_subcommand(1);

  std::vector<SubSpec> subs;
  {
    SubSpec s{"selftest",
              "randomized structural identities (algebra, cover, KAN, "
              "embeddings)",
              {}};
    s.cfg.trials = 200;
    s.cfg.order = 16;
    subs.push_back(s);
  }
  {
    SubSpec s{"ctable",
              "boundary constant: closed form vs chart integral vs limit, "
              "over a decay-rate grid",
              {}};
    s.cfg.t_min = 0.3;
    s.cfg.t_max = 1.35;
    s.cfg.t_count = 8;
    s.cfg.order = 40;
    subs.push_back(s);
  }
  {
    SubSpec s{"spherical",
              "quadrature spherical function against the closed radial "
              "forms over the time grid",
              {}};
    s.cfg.t_min = 0.3;
    s.cfg.t_max = 1.2;
    s.cfg.t_count = 4;
    s.cfg.lambda_im = -0.6;
    subs.push_back(s);
  }
  {
    SubSpec s{"fatou",
              "pointwise boundary-limit deviations along the time grid",
              {}};
    s.cfg.t_min = 4.0;
    s.cfg.t_max = 12.0;
    s.cfg.t_count = 3;
    s.cfg.lambda_im = -0.8;
    subs.push_back(s);
  }
  {
    SubSpec s{"inversion",
              "round-trip reconstruction errors along the time grid",
              {}};
    s.cfg.n = 3;
    s.cfg.t_min = 6.0;
    s.cfg.t_max = 10.0;
    s.cfg.t_count = 3;
    s.cfg.lambda_im = -0.7;
    subs.push_back(s);
  }
  {
    SubSpec s{"norm-bounds",
              "two-sided transform-norm bounds over seeded coherent data",
              {}};
    s.cfg.t_min = 0.5;
    s.cfg.t_max = 14.0;
    s.cfg.t_count = 6;
    s.cfg.t_log = true;
    s.cfg.order = 24;
    s.cfg.lambda_im = -0.8;
    subs.push_back(s);
  }

  for (SubSpec& s : subs) {
    CLI::App* sub = app.add_subcommand(s.name, s.help);
    add_common_flags(sub, s.cfg);
  }

  CLI11_PARSE(app, argc, argv);

  for (SubSpec& s : subs) {
    if (!app.got_subcommand(s.name)) continue;
    try {
      hspin::Report rep = hspin::run_harness_command(s.name, s.cfg);
      hspin::write_report(rep);
      std::size_t failed = 0;
      for (const hspin::Record& r : rep.records)
        if (!r.pass) ++failed;
      std::fprintf(stderr, "%s: %zu records, %zu failed (%.0f ms)\n",
                   s.name.c_str(), rep.records.size(), failed, rep.wall_ms);
      return rep.all_pass() ? 0 : 1;
    } catch (const std::invalid_argument& e) {
      std::fprintf(stderr, "config error: %s\n", e.what());
      return 2;
    } catch (const std::exception& e) {
      std::fprintf(stderr, "error: %s\n", e.what());
      return 3;
    }
  }
  return 2;
}
