#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "commands.hpp"

int main(int argc, char** argv) {
  using thermodtn::cli::Options;
  CLI::App app{"Thermoelastic Dirichlet-to-Neumann symbols, oracles and boundary reconstruction"};
  app.require_subcommand(1);
  Options opt;
  std::string ladder;

  auto add = [&](const std::string& name, const std::string& help, bool manifest, bool table) {
    CLI::App* sub = app.add_subcommand(name, help);
    if (manifest) sub->add_option("--manifest", opt.manifest, "Manifest JSON file")->required();
    if (table) sub->add_option("--table", opt.table, "Table JSON written by `symbols`")->required();
    sub->add_option("--out", opt.out, "Output file")->required();
    sub->add_option("--depth", opt.depth, "Table depth M (entries p_1 .. p_{1-M})");
    sub->add_option("--ladder", ladder, "Comma-separated |xi'| magnitudes");
    sub->add_option("--mode", opt.mode, "float or rational")->check(CLI::IsMember({"float", "rational"}));
    sub->add_option("--jobs", opt.jobs, "Worker threads")->check(CLI::PositiveNumber);
    sub->callback([&, name] { opt.command = name; });
  };
  add("symbols", "Build p and q tables at the manifest covectors", true, false);
  add("residual", "Grouped residuals of the factorization equation per degree", true, false);
  add("sylvester-check", "Residuals of both sign variants of the Sylvester closed form", true, false);
  add("oracle-compare", "Compare symbol sums with the half-space or slab oracle on a ladder", true, false);
  add("reconstruct", "Recover boundary jets of lambda, mu, alpha, beta from a table", false, true);
  add("round-trip", "Forward table then reconstruction, with per-order errors", true, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : thermodtn::cli::ValidationFailure;
  }
  if (!ladder.empty()) {
    std::stringstream ss(ladder);
    std::string item;
    while (std::getline(ss, item, ',')) {
      try {
        opt.ladder.push_back(std::stod(item));
      } catch (const std::exception&) {
        std::cerr << "--ladder: cannot read \"" << item << "\"\n";
        return thermodtn::cli::ValidationFailure;
      }
    }
  }
  return thermodtn::cli::run(opt, std::cout, std::cerr);
}
