// gradednet: generate datasets, train graded networks, check equivariance,
// and run the bundled case studies. Exit codes: 0 success (or equivariant),
// 2 equivariance violated, 1 tool or config error.
#include <CLI11.hpp>

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "gradednet/equivariance.hpp"
#include "gradednet/experiments.hpp"
#include "gradednet/network.hpp"
#include "gradednet/serialize.hpp"
#include "gradednet/version.hpp"

namespace fs = std::filesystem;
using gradednet::Json;

namespace {

std::string fmt_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

Json load_config(const std::string& path) {
  std::string text = gradednet::read_file(path);
  return Json::parse(text);
}

int env_workers() {
  const char* raw = std::getenv("GRADEDNET_THREADS");
  if (raw == nullptr || *raw == '\0') return 1;
  int n = std::atoi(raw);
  return n < 1 ? 1 : n;
}

template <typename T>
void read_field(const Json& j, const char* key, T& slot) {
  if (auto it = j.find(key); it != j.end()) slot = it->get<T>();
}

gradednet::Genus2Config genus2_config_from_json(const Json& j) {
  gradednet::Genus2Config cfg;
  read_field(j, "n_samples", cfg.n_samples);
  read_field(j, "seed", cfg.seed);
  read_field(j, "x10_floor", cfg.x10_floor);
  read_field(j, "split", cfg.split);
  read_field(j, "epochs", cfg.epochs);
  read_field(j, "eta", cfg.eta);
  cfg.validate();
  return cfg;
}

gradednet::SusyConfig susy_config_from_json(const Json& j) {
  gradednet::SusyConfig cfg;
  read_field(j, "n_samples", cfg.n_samples);
  read_field(j, "grid_points", cfg.grid_points);
  read_field(j, "grid_lo", cfg.grid_lo);
  read_field(j, "grid_hi", cfg.grid_hi);
  read_field(j, "seed", cfg.seed);
  read_field(j, "w_even", cfg.w_even);
  read_field(j, "w_odd", cfg.w_odd);
  read_field(j, "split", cfg.split);
  read_field(j, "epochs", cfg.epochs);
  read_field(j, "eta", cfg.eta);
  read_field(j, "decay_floor", cfg.decay_floor);
  cfg.validate();
  return cfg;
}

Json genus2_config_to_json(const gradednet::Genus2Config& c) {
  return Json{{"experiment", "genus2"}, {"n_samples", c.n_samples}, {"seed", c.seed},
              {"x10_floor", c.x10_floor}, {"split", c.split},      {"epochs", c.epochs},
              {"eta", c.eta}};
}

Json susy_config_to_json(const gradednet::SusyConfig& c) {
  return Json{{"experiment", "susy"},   {"n_samples", c.n_samples},
              {"grid_points", c.grid_points}, {"grid_lo", c.grid_lo},
              {"grid_hi", c.grid_hi},   {"seed", c.seed},
              {"w_even", c.w_even},     {"w_odd", c.w_odd},
              {"split", c.split},       {"epochs", c.epochs},
              {"eta", c.eta},           {"decay_floor", c.decay_floor}};
}

std::string experiment_name(const Json& cfg) {
  auto it = cfg.find("experiment");
  if (it == cfg.end() || !it->is_string())
    throw std::invalid_argument("experiment: must be \"genus2\" or \"susy\"");
  std::string name = it->get<std::string>();
  if (name != "genus2" && name != "susy")
    throw std::invalid_argument("experiment: unknown name \"" + name + "\"");
  return name;
}

gradednet::Dataset generate_dataset(const Json& cfg, std::uint64_t& seed_out) {
  std::string name = experiment_name(cfg);
  if (name == "genus2") {
    auto c = genus2_config_from_json(cfg);
    seed_out = c.seed;
    return gradednet::gen_genus2(c);
  }
  auto c = susy_config_from_json(cfg);
  seed_out = c.seed;
  return gradednet::gen_susy(c);
}

std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
  std::vector<std::uint64_t> seeds;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t comma = text.find(',', pos);
    std::string tok = text.substr(pos, comma == std::string::npos ? std::string::npos
                                                                  : comma - pos);
    if (tok.empty()) throw std::invalid_argument("seeds: empty entry in list");
    std::size_t used = 0;
    unsigned long long v = std::stoull(tok, &used);
    if (used != tok.size()) throw std::invalid_argument("seeds: bad entry \"" + tok + "\"");
    seeds.push_back(v);
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return seeds;
}

// ---- gen-data -------------------------------------------------------------

int cmd_gen_data(const std::string& config_path, const std::string& out_dir, bool quiet) {
  Json cfg = load_config(config_path);
  std::uint64_t seed = 0;
  gradednet::Dataset data = generate_dataset(cfg, seed);

  std::string body = gradednet::dataset_to_jsonl(data);
  std::string checksum = gradednet::content_checksum(body);
  fs::path dir(out_dir);
  gradednet::atomic_write(dir / "dataset.jsonl", body);

  Json meta{{"provenance", gradednet::provenance_json(gradednet::config_hash(cfg), seed)},
            {"rows", data.size()},
            {"checksum", checksum}};
  gradednet::atomic_write(dir / "dataset.meta.json", gradednet::canonical_dump(meta) + "\n");

  if (!quiet) {
    std::cout << "rows: " << data.size() << "\n";
    std::cout << "checksum: " << checksum << "\n";
  }
  return 0;
}

// ---- train ----------------------------------------------------------------

gradednet::GradedNetwork network_from_plan(const Json& cfg) {
  auto sig_it = cfg.find("input_sig");
  if (sig_it == cfg.end()) throw std::invalid_argument("input_sig: missing");
  gradednet::GradingSignature domain = gradednet::sig_from_json(*sig_it);

  auto layers_it = cfg.find("layers");
  if (layers_it == cfg.end() || !layers_it->is_array() || layers_it->empty())
    throw std::invalid_argument("layers: must be a non-empty array");

  std::vector<gradednet::GradedLayer> layers;
  int index = 0;
  for (const Json& lj : *layers_it) {
    std::string where = "layers[" + std::to_string(index) + "]";
    auto cod_it = lj.find("codomain");
    if (cod_it == lj.end()) throw std::invalid_argument(where + ".codomain: missing");
    gradednet::GradingSignature codomain = gradednet::sig_from_json(*cod_it);

    auto act_it = lj.find("activation");
    if (act_it == lj.end()) throw std::invalid_argument(where + ".activation: missing");
    gradednet::ActivationKind act =
        gradednet::parse_activation(act_it->get<std::string>());

    gradednet::GradedLinearMap map;
    std::map<gradednet::Grade, gradednet::Block> blocks;
    auto deg_it = lj.find("degree");
    if (deg_it != lj.end() && deg_it->is_null()) {
      for (std::size_t i = 0; i < domain.grade_count(); ++i)
        blocks.emplace(domain.grade_at(i),
                       gradednet::Block::zeros(codomain.dim_at(0), domain.dim_at(i)));
      map = gradednet::GradedLinearMap::collapse(domain, codomain, std::move(blocks));
    } else {
      gradednet::Grade degree =
          deg_it == lj.end() ? gradednet::grade_zero(domain.variant())
                             : gradednet::grade_from_json(*deg_it, domain.variant());
      for (std::size_t i = 0; i < domain.grade_count(); ++i) {
        gradednet::Grade q = domain.grade_at(i);
        if (auto idx = codomain.index_of(gradednet::grade_add(q, degree)))
          blocks.emplace(q, gradednet::Block::zeros(codomain.dim_at(*idx), domain.dim_at(i)));
      }
      if (blocks.empty())
        throw std::invalid_argument(where +
                                    ": no domain grade reaches the codomain at this degree");
      map = gradednet::GradedLinearMap::graded(domain, codomain, degree, std::move(blocks));
    }
    layers.emplace_back(map, gradednet::GradedVector(codomain), act);
    domain = codomain;
    ++index;
  }
  return gradednet::GradedNetwork(std::move(layers));
}

int cmd_train(const std::string& config_path, const std::string& out_dir, bool quiet) {
  Json cfg = load_config(config_path);
  gradednet::GradedNetwork net = network_from_plan(cfg);

  double eta = 0.01;
  int epochs = 100;
  std::uint64_t seed = 0;
  read_field(cfg, "eta", eta);
  read_field(cfg, "epochs", epochs);
  read_field(cfg, "seed", seed);
  if (epochs < 1) throw std::invalid_argument("epochs: must be >= 1");
  if (eta < 0) throw std::invalid_argument("eta: must be >= 0");

  gradednet::Dataset data;
  if (auto it = cfg.find("dataset"); it != cfg.end()) {
    data = gradednet::dataset_from_jsonl(gradednet::read_file(it->get<std::string>()));
  } else if (auto gen = cfg.find("generator"); gen != cfg.end()) {
    std::uint64_t unused = 0;
    data = generate_dataset(*gen, unused);
  } else {
    throw std::invalid_argument("dataset: need a dataset path or a generator config");
  }
  if (data.empty()) throw std::invalid_argument("dataset: empty");

  const gradednet::GradingSignature& out_sig = net.layers().back().map.codomain();
  gradednet::LossWeights weights = gradednet::LossWeights::uniform(out_sig);
  if (auto it = cfg.find("loss_weights"); it != cfg.end())
    weights = gradednet::weights_from_json(*it, out_sig.variant());

  gradednet::TrainResult result =
      gradednet::train(net, data, weights, eta, epochs, seed);

  std::string hash = gradednet::config_hash(cfg);
  Json prov = gradednet::provenance_json(hash, seed);
  fs::path dir(out_dir);

  Json checkpoint = gradednet::network_to_json(result.net);
  checkpoint["provenance"] = prov;
  gradednet::atomic_write(dir / "checkpoint.json",
                          gradednet::canonical_dump(checkpoint) + "\n");

  std::string csv = "# provenance: config_hash=" + hash + " seed=" + std::to_string(seed) +
                    " tool_version=" + gradednet::kToolVersion + "\n";
  csv += "epoch,loss\n";
  for (std::size_t i = 0; i < result.history.size(); ++i)
    csv += std::to_string(i + 1) + "," + fmt_double(result.history[i]) + "\n";
  gradednet::atomic_write(dir / "history.csv", csv);

  Json metrics{{"provenance", prov},
               {"epochs", epochs},
               {"final_loss", result.history.back()},
               {"epochs_to_improve", gradednet::epochs_to_one_percent(result.history)},
               {"params", result.net.parameter_count()}};
  gradednet::atomic_write(dir / "metrics.json", gradednet::canonical_dump(metrics) + "\n");

  if (!quiet) {
    std::cout << "trained " << epochs << " epochs on " << data.size() << " samples\n";
    std::cout << "final loss: " << fmt_double(result.history.back()) << "\n";
    std::cout << "artifacts: " << (dir / "checkpoint.json").string() << ", "
              << (dir / "history.csv").string() << ", " << (dir / "metrics.json").string()
              << "\n";
  }
  return 0;
}

// ---- check ----------------------------------------------------------------

int cmd_check(const std::string& config_path, const std::string& out_dir, bool quiet) {
  Json cfg = load_config(config_path);

  gradednet::GradingSignature domain = gradednet::GradingSignature::weights({1});
  gradednet::VectorFn fn;
  if (auto it = cfg.find("checkpoint"); it != cfg.end()) {
    Json cj = Json::parse(gradednet::read_file(it->get<std::string>()));
    auto net = std::make_shared<gradednet::GradedNetwork>(gradednet::network_from_json(cj));
    domain = net->layers().front().map.domain();
    fn = [net](const gradednet::GradedVector& v) { return net->forward(v); };
  } else if (auto nit = cfg.find("network"); nit != cfg.end()) {
    auto net = std::make_shared<gradednet::GradedNetwork>(gradednet::network_from_json(*nit));
    domain = net->layers().front().map.domain();
    fn = [net](const gradednet::GradedVector& v) { return net->forward(v); };
  } else if (auto mit = cfg.find("map"); mit != cfg.end()) {
    auto map = std::make_shared<gradednet::GradedLinearMap>(gradednet::map_from_json(*mit));
    domain = map->domain();
    fn = [map](const gradednet::GradedVector& v) { return map->apply(v); };
  } else {
    throw std::invalid_argument("check config requires one of: checkpoint, network, map");
  }

  gradednet::ProbeOptions opts;
  if (auto it = cfg.find("lambdas"); it != cfg.end())
    opts.lambdas = it->get<std::vector<double>>();
  read_field(cfg, "probe_count", opts.probe_count);
  read_field(cfg, "tol", opts.tol);
  read_field(cfg, "seed", opts.seed);

  gradednet::EquivarianceReport rep = gradednet::check_map_equivariance(fn, domain, opts);

  Json rj = gradednet::report_to_json(rep);
  rj["provenance"] = gradednet::provenance_json(gradednet::config_hash(cfg), opts.seed);
  gradednet::atomic_write(fs::path(out_dir) / "report.json",
                          gradednet::canonical_dump(rj) + "\n");

  if (!quiet) {
    if (rep.equivariant) {
      std::cout << "equivariant (max violation " << fmt_double(rep.max_violation)
                << " <= tol " << fmt_double(opts.tol) << ")\n";
    } else {
      std::cout << "violated: max violation " << fmt_double(rep.max_violation)
                << " at lambda " << fmt_double(rep.witness.lambda) << " (tol "
                << fmt_double(opts.tol) << ")\n";
    }
  }
  return rep.equivariant ? 0 : 2;
}

// ---- experiment -----------------------------------------------------------

double mean_of_ints(const std::vector<int>& xs) {
  if (xs.empty()) return 0.0;
  double s = 0.0;
  for (int x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

void print_table_row(const gradednet::MetricsRecord& rec) {
  std::printf("%-8s %-9s %12.6g ± %-10.4g %8lld %10.1f %10.2f\n", rec.experiment.c_str(),
              rec.model.c_str(), rec.mean_mse, rec.std_mse,
              static_cast<long long>(rec.params), mean_of_ints(rec.epochs_to_improve),
              rec.wall_seconds);
}

int cmd_experiment(const std::string& config_path, const std::string& out_dir,
                   const std::string& seeds_flag, bool quiet) {
  Json cfg = load_config(config_path);
  std::string name = experiment_name(cfg);

  std::vector<std::uint64_t> seeds;
  if (!seeds_flag.empty()) {
    seeds = parse_seed_list(seeds_flag);
  } else if (auto it = cfg.find("seeds"); it != cfg.end()) {
    seeds = it->get<std::vector<std::uint64_t>>();
  }

  int workers = env_workers();
  Json effective;
  std::pair<gradednet::MetricsRecord, gradednet::MetricsRecord> out;
  if (name == "genus2") {
    auto c = genus2_config_from_json(cfg);
    effective = genus2_config_to_json(c);
    out = gradednet::run_genus2(c, seeds, workers);
  } else {
    auto c = susy_config_from_json(cfg);
    effective = susy_config_to_json(c);
    out = gradednet::run_susy(c, seeds, workers);
  }
  const gradednet::MetricsRecord& graded = out.first;
  const gradednet::MetricsRecord& baseline = out.second;

  std::string hash = gradednet::config_hash(cfg);
  fs::path dir(out_dir);

  std::string csv = "# config: " + gradednet::canonical_dump(effective) + "\n";
  csv += "# provenance: config_hash=" + hash + " seed=" + std::to_string(graded.seeds.front()) +
         " tool_version=" + gradednet::kToolVersion + "\n";
  csv += "experiment,model,seed,val_mse,params\n";
  for (const auto* rec : {&graded, &baseline}) {
    for (std::size_t i = 0; i < rec->seeds.size(); ++i) {
      csv += rec->experiment + "," + rec->model + "," + std::to_string(rec->seeds[i]) + "," +
             fmt_double(rec->val_mse[i]) + "," + std::to_string(rec->params) + "\n";
    }
  }
  gradednet::atomic_write(dir / "summary.csv", csv);

  Json metrics{{"provenance", gradednet::provenance_json(hash, graded.seeds.front())},
               {"graded", gradednet::metrics_to_json(graded)},
               {"baseline", gradednet::metrics_to_json(baseline)}};
  gradednet::atomic_write(dir / "metrics.json", gradednet::canonical_dump(metrics) + "\n");

  if (!quiet) {
    std::printf("%-8s %-9s %12s ± %-10s %8s %10s %10s\n", "expt", "model", "mse mean", "std",
                "params", "ep-to-1%", "wall[s]");
    print_table_row(graded);
    print_table_row(baseline);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"graded neural networks: data generation, training, equivariance checks"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(gradednet::kToolVersion));

  std::string config_path;
  std::string out_dir = ".";
  std::string seeds_flag;
  bool quiet = false;

  auto add_common = [&](CLI::App* sub, bool needs_out) {
    sub->add_option("--config", config_path, "JSON config file")->required();
    auto* out = sub->add_option("--out", out_dir, "output directory");
    if (needs_out) out->required();
    sub->add_flag("--quiet", quiet, "suppress console summary");
  };

  CLI::App* gen = app.add_subcommand("gen-data", "generate a dataset as JSONL");
  add_common(gen, true);
  CLI::App* train = app.add_subcommand("train", "train a network from a config");
  add_common(train, true);
  CLI::App* check = app.add_subcommand("check", "check a map or checkpoint for equivariance");
  add_common(check, false);
  CLI::App* expt = app.add_subcommand("experiment", "run a bundled case study over seeds");
  add_common(expt, true);
  expt->add_option("--seeds", seeds_flag, "comma-separated seed list (overrides config)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    if (gen->parsed()) return cmd_gen_data(config_path, out_dir, quiet);
    if (train->parsed()) return cmd_train(config_path, out_dir, quiet);
    if (check->parsed()) return cmd_check(config_path, out_dir, quiet);
    return cmd_experiment(config_path, out_dir, seeds_flag, quiet);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
