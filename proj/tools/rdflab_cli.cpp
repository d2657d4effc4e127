// rdflab command line: collection generators, ratio sweeps, self-checks,
// decomposition certificates and the multiplier bound pipeline.
//
// Exit codes: 0 success, 1 validation failure, 2 a verify suite failed.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "rdflab/rdflab.hpp"

namespace {

using namespace rdflab;

constexpr int kExitValidation = 1;
constexpr int kExitVerify = 2;

// Writes to the named file, or stdout for "" or "-".
class Sink {
 public:
  explicit Sink(const std::string& path) {
    if (!path.empty() && path != "-") {
      file_ = std::make_unique<std::ofstream>(path);
      detail::require(file_->good(), "cannot write " + path);
    }
  }
  std::ostream& operator*() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

Signal load_or_random(const std::string& path, int N, std::mt19937_64& rng) {
  if (path.empty()) return Signal(detail::gaussian_values(N, rng));
  std::ifstream in(path);
  detail::require(in.good(), "cannot open " + path);
  auto s = read_signal_text(in);
  detail::require(s.size() == N, "signal " + path + " has length " + std::to_string(s.size()) + ", expected " +
                                     std::to_string(N));
  return s;
}

nlohmann::ordered_json bound_json(const BoundReport& rep) {
  nlohmann::ordered_json j;
  j["beta"] = rep.beta;
  j["r"] = rep.r;
  j["p"] = rep.p;
  j["q"] = rep.q;
  j["s"] = rep.s;
  j["norm_a"] = rep.norm_a;
  j["carleson_C"] = std::isinf(rep.carleson_C) ? nlohmann::ordered_json(nullptr) : nlohmann::ordered_json(rep.carleson_C);
  j["layered"] = rep.layered;
  auto bins = nlohmann::ordered_json::array();
  for (const auto& b : rep.bins) {
    nlohmann::ordered_json rec;
    rec["n"] = b.n;
    rec["count"] = b.count;
    rec["count_bound"] = b.count_bound;
    rec["coef_norm"] = b.coef_norm;
    rec["layers"] = b.layers;
    rec["tr_norm_s"] = b.tr_norm_s;
    rec["tr_norm_1"] = b.tr_norm_1;
    rec["term"] = b.term;
    bins.push_back(std::move(rec));
  }
  j["bins"] = std::move(bins);
  j["max_pointwise_excess"] = rep.max_pointwise_excess;
  j["mean_abs"] = rep.mean_abs;
  j["final_bound"] = rep.final_bound;
  j["geometric_factor"] = rep.geometric_factor;
  j["geometric_limit"] = rep.geometric_limit;
  j["majorant"] = rep.majorant;
  return j;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"rdflab: Rubio de Francia type square-function toolkit on Z_N"};
  app.require_subcommand(1);

  // gen
  auto* gen = app.add_subcommand("gen", "emit a square collection as line-delimited JSON");
  std::string gen_name = "packing", gen_out;
  int gen_K = 16, gen_N = 512;
  std::uint64_t gen_seed = 1;
  gen->add_option("--generator,-g", gen_name, "line, grid, product or packing")
      ->check(CLI::IsMember({"line", "grid", "product", "packing"}));
  gen->add_option("--K,-K", gen_K, "number of squares (a perfect square for grid and product)");
  gen->add_option("--N,-N", gen_N, "grid size, a power of two");
  gen->add_option("--seed", gen_seed);
  gen->add_option("--out,-o", gen_out, "output file (default stdout)");

  // norms
  auto* norms = app.add_subcommand("norms", "best-found ratio ||T^r(f,g)||_s / (||f||_p ||g||_q)");
  std::string norms_config, norms_csv, norms_summary, norms_collection;
  double np = 2.5, nq = 2.5, nr = 3.0;
  SearchConfig ncfg;
  auto* cfg_opt = norms->add_option("--config,-c", norms_config, "JSON sweep config");
  auto* col_opt = norms->add_option("--collection", norms_collection, "single collection file instead of a sweep");
  cfg_opt->excludes(col_opt);
  norms->add_option("--csv", norms_csv, "CSV output (default stdout)");
  norms->add_option("--summary", norms_summary, "summary JSON output");
  norms->add_option("--p", np);
  norms->add_option("--q", nq);
  norms->add_option("--r", nr);
  norms->add_option("--restarts", ncfg.restarts);
  norms->add_option("--iterations", ncfg.iterations);
  norms->add_option("--seed", ncfg.seed);
  norms->add_option("--threads", ncfg.threads);

  // verify
  auto* verify = app.add_subcommand("verify", "run self-check suites against brute-force oracles");
  std::vector<std::string> suites;
  std::uint64_t verify_seed = 1;
  int verify_trials = 10;
  verify->add_option("--suite,-s", suites, "suite name; repeatable (default all)")
      ->check(CLI::IsMember(verify_suite_names()));
  verify->add_option("--seed", verify_seed);
  verify->add_option("--trials", verify_trials);

  // decompose
  auto* dec = app.add_subcommand("decompose", "emit energy and decomposition certificates");
  std::string dec_collection, dec_f, dec_g, dec_out;
  std::uint64_t dec_seed = 1;
  double dec_r0 = 2.5, dec_r = 3.0;
  std::size_t dec_max_tiles = 300;
  dec->add_option("--collection", dec_collection, "collection file")->required();
  dec->add_option("--f", dec_f, "signal text file for f (default seeded Gaussian)");
  dec->add_option("--g", dec_g, "signal text file for g (default seeded Gaussian)");
  dec->add_option("--seed", dec_seed);
  dec->add_option("--r0", dec_r0);
  dec->add_option("--r", dec_r);
  dec->add_option("--max-tiles", dec_max_tiles, "keep a seeded sample of at most this many tiles");
  dec->add_option("--out,-o", dec_out);

  // multiplier
  auto* mul = app.add_subcommand("multiplier", "bilinear multiplier bound pipeline");
  std::string mul_family, mul_out, mul_write;
  std::uint64_t mul_seed = 1;
  int mul_L = 8, mul_roots = 8, mul_depth = 5;
  double mul_beta = 1.2, mul_r = 3.0, mul_p = 2.5, mul_q = 2.5;
  mul->add_option("--family", mul_family, "coefficient family file (default: seeded random family)");
  mul->add_option("--write-family", mul_write, "also save the family used");
  mul->add_option("--L", mul_L);
  mul->add_option("--roots", mul_roots);
  mul->add_option("--depth", mul_depth);
  mul->add_option("--beta", mul_beta);
  mul->add_option("--seed", mul_seed);
  mul->add_option("--r", mul_r);
  mul->add_option("--p", mul_p);
  mul->add_option("--q", mul_q);
  mul->add_option("--out,-o", mul_out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitValidation;
  }

  try {
    if (*gen) {
      Sink out(gen_out);
      write_collection(*out, generate(gen_name, gen_K, gen_N, gen_seed));
    } else if (*norms) {
      Sink csv(norms_csv);
      ExperimentResult res;
      if (!norms_collection.empty()) {
        const auto omega = load_collection(norms_collection);
        ncfg.N = omega.N();
        auto rec = estimate_ratio(omega, ExponentTuple::make(np, nq, nr), ncfg, "file");
        rec.millis = 0.0;
        *csv << kCsvHeader << '\n' << csv_row(rec) << '\n';
        res.records.push_back(rec);
        res.uniformity = uniformity_summary(res.records);
      } else {
        detail::require(!norms_config.empty(), "norms needs --config or --collection");
        res = run_experiment(load_experiment_config(norms_config), *csv);
      }
      if (!norms_summary.empty()) {
        Sink s(norms_summary);
        *s << summary_json(res).dump(2) << '\n';
      }
      for (const auto& e : res.errors) std::cerr << "cell failed: " << e << '\n';
    } else if (*verify) {
      if (suites.empty()) suites = verify_suite_names();
      bool all_ok = true;
      for (const auto& name : suites) {
        const auto r = run_verify_suite(name, verify_seed, verify_trials);
        std::cout << (r.ok() ? "ok   " : "FAIL ") << r.name << "  checks=" << r.checks << "  worst=" << r.worst
                  << '\n';
        for (const auto& f : r.failures) std::cout << "    " << f << '\n';
        all_ok = all_ok && r.ok();
      }
      return all_ok ? 0 : kExitVerify;
    } else if (*dec) {
      const auto omega = load_collection(dec_collection);
      std::mt19937_64 rng(splitmix64(dec_seed, 21));
      const auto pop = detail::sampled_population(omega, dec_max_tiles, rng);
      const auto f = load_or_random(dec_f, omega.N(), rng);
      const auto g = load_or_random(dec_g, omega.N(), rng);
      const auto h = detail::gaussian_h(omega, rng);
      const auto c = coefficients(f, g, h, pop, dec_r0, dec_r);
      const Size3Evaluator ev(pop, h, dec_r);
      Sink out(dec_out);
      for (auto o : {Orientation::column, Orientation::row})
        write_certificate(*out, pop, energy12(pop, c, o, EnergyMode::exact));
      write_certificate(*out, pop, energy3(ev));
      write_decomposition(*out, pop, global_decompose(pop, c, ev));
    } else if (*mul) {
      std::mt19937_64 rng(splitmix64(mul_seed, 31));
      const auto fam = mul_family.empty() ? random_family(mul_L, mul_roots, mul_depth, mul_beta, rng)
                                          : load_family(mul_family);
      if (!mul_write.empty()) {
        std::ofstream w(mul_write);
        detail::require(w.good(), "cannot write " + mul_write);
        write_family(w, fam);
      }
      const Signal f(detail::gaussian_values(fam.N(), rng)), g(detail::gaussian_values(fam.N(), rng));
      Sink out(mul_out);
      *out << bound_json(bound_pipeline(f, g, fam, mul_r, mul_p, mul_q)).dump(2) << '\n';
    }
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  }
  return 0;
}
