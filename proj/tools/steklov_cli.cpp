#include "steklov/cli.hpp"
#include "steklov/errors.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <utility>

namespace {

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    if (!cell.empty()) out.push_back(std::stod(cell));
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Steklov inverse-problem laboratory"};
  app.require_subcommand(1);

  std::string config_path, output, base_kind, coeffs, scales, route;
  int workers = 0, d = 0, K = 0, M = 0, n = -1, K_max = 0;
  unsigned precision = 0;
  double delta = 0, T = 0, beta = 0, gamma = 0, c1 = 0, kappa1 = 0, tail_a = 0, tail_rho = 0, B = 0;
  long long seed = 0;

  std::vector<CLI::App*> subs;
  const std::pair<const char*, const char*> commands[] = {
      {"forward", "Steklov eigenvalues of a radial potential"},
      {"perturb", "spectral shift, resonances and eigenvalues of a perturbed amplitude"},
      {"reconstruct", "recover Q on [0, T] from its amplitude by the Gelfand-Levitan solver"},
      {"muntz", "orthonormal Muntz coefficients and the certified degree"},
      {"sweep", "stability sweep over perturbation scales with a Hoelder fit"},
      {"ks-check", "positivity, quasi-Szego and normalization diagnostics"}};
  for (const auto& [name, about] : commands) {
    auto* sub = app.add_subcommand(name, about);
    sub->add_option("--config", config_path, "JSON configuration file");
    sub->add_option("--output", output, "output CSV path (stdout when absent)");
    sub->add_option("--workers", workers, "parallel workers");
    sub->add_option("--precision", precision, "Müntz working precision in bits");
    sub->add_option("--d", d);
    sub->add_option("--delta", delta);
    sub->add_option("--T", T);
    sub->add_option("--K", K);
    sub->add_option("--K-max", K_max);
    sub->add_option("--M", M);
    sub->add_option("--n", n, "Müntz degree");
    sub->add_option("--base", base_kind, "zero | bargmann1 | bargmann2");
    sub->add_option("--beta", beta);
    sub->add_option("--gamma", gamma);
    sub->add_option("--c1", c1);
    sub->add_option("--kappa1", kappa1);
    sub->add_option("--coeffs", coeffs, "comma-separated c_k");
    sub->add_option("--tail-a", tail_a);
    sub->add_option("--tail-rho", tail_rho);
    sub->add_option("--scales", scales, "comma-separated sweep scales");
    sub->add_option("--route", route, "ode | laplace | closed_form");
    sub->add_option("--B", B);
    sub->add_option("--seed", seed);
    subs.push_back(sub);
  }
  CLI11_PARSE(app, argc, argv);

  CLI::App* sub = nullptr;
  for (auto* s : subs) {
    if (s->parsed()) sub = s;
  }
  auto given = [&](const char* flag) { return sub->count(flag) > 0; };

  try {
    nlohmann::json j = nlohmann::json::object();
    if (!config_path.empty()) {
      std::ifstream f(config_path);
      if (!f) throw steklov::ValidationError("cli", "cannot read configuration " + config_path);
      try {
        j = nlohmann::json::parse(f);
      } catch (const nlohmann::json::exception& e) {
        throw steklov::ValidationError("cli", std::string("configuration is not valid JSON: ") + e.what());
      }
    }
    j["command"] = sub->get_name();
    if (given("--output")) j["output"] = output;
    if (given("--workers")) j["workers"] = workers;
    if (given("--precision")) j["precision"] = precision;
    if (given("--d")) j["d"] = d;
    if (given("--delta")) j["delta"] = delta;
    if (given("--T")) j["T"] = T;
    if (given("--K")) j["K"] = K;
    if (given("--K-max")) j["K_max"] = K_max;
    if (given("--M")) j["M"] = M;
    if (given("--n")) j["n"] = n;
    if (given("--base")) {
      nlohmann::json b{{"kind", base_kind}};
      if (base_kind == "bargmann1") {
        b["beta"] = beta;
        b["gamma"] = gamma;
      } else if (base_kind == "bargmann2") {
        b["c1"] = c1;
        b["kappa1"] = kappa1;
      }
      j["base"] = b;
    }
    if (given("--coeffs")) j["coeffs"] = parse_list(coeffs);
    if (given("--tail-a") || given("--tail-rho")) j["tail"] = {{"a", tail_a}, {"rho", tail_rho}};
    if (given("--scales")) j["scales"] = parse_list(scales);
    if (given("--route")) j["route"] = route;
    if (given("--B")) j["B"] = B;
    if (given("--seed")) j["seed"] = seed;

    const auto cfg = steklov::config_from_json(j);
    return steklov::run(cfg, std::cout, std::cerr);
  } catch (const steklov::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: cli: malformed number (" << e.what() << ")\n";
    return 2;
  }
}
