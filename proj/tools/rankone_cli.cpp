// Command line front end: run experiment configs, list the bundled ones,
// decide order relations, and audit the measure engine against the
// geometric oracle. Exit codes: 0 all verifications succeeded, 2 a stored
// claim was falsified, 1 usage or resource problems.
#include <cstdint>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "rankone/errors.hpp"
#include "rankone/experiment.hpp"
#include "rankone/numeric.hpp"
#include "rankone/vector_order.hpp"

namespace {

using rankone::BigInt;
using rankone::Limits;
using rankone::Vector;

Vector parse_vector_arg(const std::vector<std::string>& parts, const std::string& name) {
  std::vector<BigInt> comps;
  for (const std::string& p : parts) {
    try {
      comps.emplace_back(p);
    } catch (const std::exception&) {
      throw rankone::ArgumentError(name + ": malformed integer '" + p + "'");
    }
  }
  return rankone::make_vector(std::move(comps));
}

nlohmann::ordered_json witness_json(const rankone::OrderWitness& w) {
  nlohmann::ordered_json doc;
  doc["n"] = w.n.str();
  doc["m"] = w.m.str();
  if (w.relation == rankone::OrderWitness::Relation::le_p) {
    doc["c"] = w.c.str();
    doc["injection"] = w.injection;
  } else {
    doc["plus_sets"] = w.plus_sets;
    doc["minus_sets"] = w.minus_sets;
  }
  return doc;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact-arithmetic engine for rank-one cutting-and-stacking constructions"};
  app.require_subcommand(1);

  std::uint32_t depth_cap = Limits{}.depth_cap;
  std::uint64_t cardinality_budget = Limits{}.cardinality_budget.convert_to<std::uint64_t>();
  std::uint32_t threads = 1;
  app.add_option("--depth-cap", depth_cap, "Maximum expansion depth");
  app.add_option("--cardinality-budget", cardinality_budget,
                 "Maximum descendant set size per computation");
  app.add_option("--threads", threads, "Worker threads for experiment execution")
      ->check(CLI::Range(1u, 64u));

  auto* run = app.add_subcommand("run", "Run an experiment config and write its outputs");
  std::string config_path;
  std::string bundled_name;
  std::string out_dir;
  run->add_option("config", config_path, "Path to a JSON experiment config");
  run->add_option("--bundled", bundled_name, "Name of a bundled config to run");
  run->add_option("--out", out_dir, "Output directory (overrides the config)");

  auto* list = app.add_subcommand("list", "List the bundled experiment configs");

  auto* order = app.add_subcommand("order", "Decide the order relations between two vectors");
  std::vector<std::string> v_parts;
  std::vector<std::string> w_parts;
  order->add_option("-v", v_parts, "Components of v")->required()->expected(1, 14);
  order->add_option("-w", w_parts, "Components of w")->required()->expected(1, 14);

  auto* audit = app.add_subcommand(
      "audit", "Compare the measure engine against the geometric oracle on a fixed battery");

  try {
    app.parse(argc, argv);

    Limits limits;
    limits.depth_cap = depth_cap;
    limits.cardinality_budget = cardinality_budget;

    if (run->parsed()) {
      if (config_path.empty() == bundled_name.empty())
        throw rankone::ArgumentError("run: give exactly one of a config path or --bundled NAME");
      rankone::experiment::RunOptions opts;
      opts.limits = limits;
      opts.threads = threads;
      if (!out_dir.empty()) opts.output_override = out_dir;
      const rankone::experiment::RunOutcome outcome =
          bundled_name.empty() ? rankone::experiment::run_config_file(config_path, opts)
                               : rankone::experiment::run_bundled(bundled_name, opts);
      for (const auto& r : outcome.results)
        std::cout << r.index << " " << r.label << " [" << r.status << "] " << r.detail << "\n";
      std::cout << "outputs in " << outcome.output_dir << "\n";
      return outcome.exit_code;
    }

    if (list->parsed()) {
      for (const auto& c : rankone::experiment::bundled_configs())
        std::cout << c.name << "\n    " << c.description << "\n";
      return 0;
    }

    if (order->parsed()) {
      const Vector v = parse_vector_arg(v_parts, "-v");
      const Vector w = parse_vector_arg(w_parts, "-w");
      const rankone::OrderDecision p = rankone::decide_le_p(v, w);
      const rankone::OrderDecision m = rankone::decide_le_m(v, w);
      nlohmann::ordered_json doc;
      doc["le_p"]["holds"] = p.holds;
      if (p.holds) doc["le_p"]["witness"] = witness_json(*p.witness);
      doc["le_m"]["holds"] = m.holds;
      if (m.holds) doc["le_m"]["witness"] = witness_json(*m.witness);
      std::cout << doc.dump(2) << "\n";
      return 0;
    }

    if (audit->parsed()) {
      const rankone::experiment::AuditReport report =
          rankone::experiment::standard_audit_battery(limits);
      std::cout << report.cases << " cases agreed, " << report.skipped << " skipped, "
                << report.mismatches.size() << " mismatches\n";
      for (const std::string& m : report.mismatches) std::cout << "  " << m << "\n";
      return report.mismatches.empty() ? 0 : 2;
    }
    return 1;
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const rankone::AnomalyError& e) {
    std::cerr << "anomaly: " << e.what() << "\n";
    return 2;
  } catch (const rankone::BudgetError& e) {
    std::cerr << "budget: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
