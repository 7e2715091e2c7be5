#pragma once

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "iakr/json_io.hpp"
#include "iakr/parser.hpp"

// Command-line front end. Every run writes one JSON payload to stdout and a
// one-line human summary to stderr. Exit codes: 0 = answered, 1 = answered
// negative (violations found, not implied, no countermodel exists),
// 2 = usage or input error, 3 = internal invariant failure.

namespace iakr {
namespace detail {

inline std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline int saturation_cap_from_env() {
  const char* env = std::getenv("IAKR_SCHEMA_CAP");
  if (env == nullptr || *env == '\0') return Saturation::kDefaultCap;
  std::string s(env);
  for (char c : s)
    if (!std::isdigit(static_cast<unsigned char>(c)))
      throw ValidationError("IAKR_SCHEMA_CAP must be a positive integer, got \"" + s + "\"");
  if (s.size() > 2) throw ValidationError("IAKR_SCHEMA_CAP is out of range: " + s);
  return std::stoi(s);  // the saturation engine enforces its own ceiling
}

inline std::vector<std::string> split_names(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string word;
  while (in >> word) out.push_back(word);
  return out;
}

/// Proofs leave the process only after revalidation.
inline json certified_proof_json(const ProofTree& proof, const ConstraintSet& hypotheses) {
  ProofCheckResult res = check_proof(proof, hypotheses);
  if (!res.ok) throw InternalError("emitted proof failed validation: " + res.error);
  return proof_json(proof, hypotheses.schema());
}

}  // namespace detail

inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"keys and independence atoms: checking, implication, proofs, countermodels",
               "iakr"};
  app.require_subcommand(1);

  bool pretty = false;
  bool seedless = false;
  bool certify = false;
  app.add_flag("--json", pretty, "pretty-print the JSON payload");
  app.add_flag("--seedless", seedless,
               "reserved: every construction is already deterministic and RNG-free");
  std::string constraints_path, data_path, query_text;

  auto* check_cmd = app.add_subcommand("check", "test a CSV relation against constraints");
  check_cmd->add_option("--constraints", constraints_path, "constraint file")->required();
  check_cmd->add_option("--data", data_path, "CSV relation")->required();

  auto* imply_cmd = app.add_subcommand("imply", "decide whether the constraints imply a query");
  imply_cmd->add_option("--constraints", constraints_path, "constraint file")->required();
  imply_cmd->add_option("--query", query_text, "key(...) or ind(... ; ...)")->required();
  std::string mode = "general";
  imply_cmd->add_option("--mode", mode, "general (default) or finite-bounded")
      ->check(CLI::IsMember({"general", "finite-bounded"}));
  int max_tuples = 3, max_values = 3;
  imply_cmd->add_option("--max-tuples", max_tuples, "row bound for finite-bounded mode");
  imply_cmd->add_option("--max-values", max_values, "per-column value bound for finite-bounded mode");
  imply_cmd->add_flag("--certify", certify, "attach a checked proof or a verified countermodel");

  auto* derive_cmd = app.add_subcommand("derive", "saturate the hypotheses and dump proofs");
  derive_cmd->add_option("--constraints", constraints_path, "constraint file")->required();
  derive_cmd->add_option("--query", query_text, "optional single statement to look up");

  auto* counter_cmd =
      app.add_subcommand("countermodel", "build a relation satisfying the constraints but not the query");
  counter_cmd->add_option("--constraints", constraints_path, "constraint file")->required();
  counter_cmd->add_option("--query", query_text, "key(...) or ind(... ; ...)")->required();
  int rounds = -1;
  counter_cmd->add_option("--rounds", rounds, "completion rounds (default: 3 per scheduled atom)");

  auto* paper_cmd = app.add_subcommand("paper", "reproduce the structured constructions");
  int lemma = 0, sigma_param = 0, kary_param = 0;
  auto* lemma_opt = paper_cmd->add_option("--lemma", lemma, "construction 1-6")
                        ->check(CLI::Range(1, 6));
  auto* sigma_opt = paper_cmd->add_option("--sigma-n", sigma_param, "print the cyclic family");
  auto* kary_opt = paper_cmd->add_option("--kary-demo", kary_param, "verify the arity gap");
  lemma_opt->excludes(sigma_opt)->excludes(kary_opt);
  sigma_opt->excludes(kary_opt);
  int n_param = 2, i_param = 1, depth = 4;
  std::string d_text;
  paper_cmd->add_option("--n", n_param, "cycle length (default 2)");
  paper_cmd->add_option("--d", d_text, "attribute set, e.g. \"A1 B1 A3\"");
  paper_cmd->add_option("--i", i_param, "pair index for constructions 5 and 6 (default 1)");
  paper_cmd->add_option("--depth", depth, "chain depth for construction 2 (default 4)");
  paper_cmd->add_option("--data", data_path, "CSV model for construction 1 (default: 3x3 grid)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  json payload;
  int exit_code = 0;
  std::string summary;

  try {
    if (check_cmd->parsed()) {
      ConstraintSet cs = parse_constraints(detail::slurp(constraints_path));
      Relation r = load_relation(detail::slurp(data_path), cs.schema());
      SatisfactionReport report = satisfies_all(r, cs);
      payload = report_json(report, cs.schema());
      payload["command"] = "check";
      payload["rows"] = r.size();
      int violated = 0;
      for (const auto& e : report.entries)
        if (!e.result.holds()) ++violated;
      if (report.all_hold) {
        summary = "all " + std::to_string(report.entries.size()) + " constraints hold on " +
                  std::to_string(r.size()) + " rows";
      } else {
        summary = std::to_string(violated) + " of " + std::to_string(report.entries.size()) +
                  " constraints violated";
        exit_code = 1;
      }
    } else if (imply_cmd->parsed()) {
      ConstraintSet cs = parse_constraints(detail::slurp(constraints_path));
      Constraint phi = parse_query(query_text, cs.schema());
      payload["command"] = "imply";
      payload["mode"] = mode;
      payload["query"] = phi.format(cs.schema());
      if (mode == "general") {
        ImplicationAnswer ans = implies_general(cs, phi);
        if (ans.implied) {
          payload["verdict"] = "implied";
          if (certify) {
            if (!ans.proof) throw InternalError("implied verdict arrived without a proof");
            payload["proof"] = detail::certified_proof_json(*ans.proof, cs);
          }
          summary = "implied";
        } else {
          payload["verdict"] = "not-implied";
          if (certify) {
            ChasePrefix prefix = theorem2_prefix(cs, phi);
            payload["recipe"] = json{{"generator", "theorem2_prefix"},
                                     {"rounds", prefix.rounds_done()},
                                     {"sigma", constraints_json(cs)},
                                     {"phi", phi.format(cs.schema())}};
            payload["countermodel"] =
                json{{"csv", write_csv(prefix.relation())}, {"manifest", manifest_json(prefix)}};
          }
          summary = "not implied";
          exit_code = 1;
        }
      } else {
        std::optional<Relation> hit = bounded_search(cs, phi, max_tuples, max_values);
        payload["bounds"] = json{{"max_tuples", max_tuples}, {"max_values", max_values}};
        if (hit) {
          CountermodelCheck chk = verify_countermodel(*hit, cs, phi);
          if (!chk.ok) throw InternalError("bounded search returned an invalid countermodel");
          payload["verdict"] = "not-implied";
          payload["countermodel"] = json{{"csv", write_csv(*hit)}};
          summary = "not implied: counterexample with " + std::to_string(hit->size()) + " rows";
          exit_code = 1;
        } else {
          payload["verdict"] = "inconclusive";
          payload["note"] =
              "no counterexample within bounds; this does not decide implication";
          summary = "inconclusive: no counterexample within bounds";
        }
      }
    } else if (derive_cmd->parsed()) {
      ConstraintSet cs = parse_constraints(detail::slurp(constraints_path));
      int cap = detail::saturation_cap_from_env();
      Saturation sat = saturate(cs, cap);
      payload["command"] = "derive";
      payload["cap"] = cap;
      json members = json::array();
      for (const auto& c : sat.members()) {
        ProofTree proof = sat.proof_of(c);
        members.push_back(json{{"constraint", c.format(cs.schema())},
                               {"proof", detail::certified_proof_json(proof, cs)}});
      }
      payload["members"] = std::move(members);
      summary = std::to_string(sat.members().size()) + " derivable constraints";
      if (!query_text.empty()) {
        Constraint phi = parse_query(query_text, cs.schema());
        bool derivable = sat.derives(phi);
        payload["query"] = phi.format(cs.schema());
        payload["derivable"] = derivable;
        if (derivable)
          payload["query_proof"] = detail::certified_proof_json(sat.proof_of(phi), cs);
        else
          exit_code = 1;
        summary = phi.format(cs.schema()) + (derivable ? " is derivable" : " is not derivable");
      }
    } else if (counter_cmd->parsed()) {
      ConstraintSet cs = parse_constraints(detail::slurp(constraints_path));
      Constraint phi = parse_query(query_text, cs.schema());
      payload["command"] = "countermodel";
      payload["query"] = phi.format(cs.schema());
      ImplicationAnswer ans = implies_general(cs, phi);
      if (ans.implied) {
        payload["verdict"] = "implied";
        payload["note"] = "no countermodel exists; the hypotheses imply the query";
        if (ans.proof) payload["proof"] = detail::certified_proof_json(*ans.proof, cs);
        summary = "implied; no countermodel exists";
        exit_code = 1;
      } else {
        ChasePrefix prefix = theorem2_prefix(cs, phi, rounds);
        payload["verdict"] = "countermodel";
        payload["manifest"] = manifest_json(prefix);
        payload["rows"] = prefix.relation().size();
        payload["csv"] = write_csv(prefix.relation());
        summary = "countermodel with " + std::to_string(prefix.relation().size()) + " rows after " +
                  std::to_string(prefix.rounds_done()) + " rounds";
      }
    } else if (paper_cmd->parsed()) {
      payload["command"] = "paper";
      if (*sigma_opt) {
        SigmaN sn = sigma_n(sigma_param);
        payload["sigma_n"] = sn.n;
        payload["schema"] = sn.schema.attrs();
        payload["constraints"] = constraints_json(sn.sigma);
        payload["text"] = print_constraints(sn.sigma);
        if (sn.n <= 8) payload["upward_closure_size"] = upward_members(sn).size();
        summary = "cyclic family over " + std::to_string(2 * sn.n) + " attributes";
      } else if (*kary_opt) {
        KaryDemo demo = kary_demo(kary_param);
        payload["kary_demo"] = kary_demo_json(demo);
        summary = std::to_string(demo.pairs_verified) + " countermodels verified; arity bound " +
                  std::to_string(demo.arity_bound);
      } else if (*lemma_opt) {
        payload["lemma"] = lemma;
        switch (lemma) {
          case 1: {
            SigmaN sn = sigma_n(n_param);
            Relation r = [&] {
              if (!data_path.empty()) return load_relation(detail::slurp(data_path), sn.schema);
              Relation grid(sn.schema);
              std::vector<Value> row(2 * n_param);
              for (Value x = 0; x < 3; ++x)
                for (Value y = 0; y < 3; ++y) {
                  for (int i = 1; i <= n_param; ++i) {
                    row[sn.pos_a(i)] = x;
                    row[sn.pos_b(i)] = y;
                  }
                  grid.append_row(row);
                }
              return grid;
            }();
            CountingChain cc = counting_chain(r, n_param);
            payload["chain"] = counting_chain_json(cc);
            summary = "counting argument concludes key(A1 B1) on " + std::to_string(cc.total) +
                      " rows";
            break;
          }
          case 2: {
            ChasePrefix chain = lemma2_chain(depth);
            payload["depth"] = depth;
            payload["rows"] = chain.relation().size();
            payload["max_value"] = chain.max_value();
            if (chain.relation().size() <= 10000)
              payload["csv"] = write_csv(chain.relation());
            else
              payload["note"] = "relation too large to embed; rerun with a smaller --depth";
            summary = "chain model of depth " + std::to_string(depth) + " with " +
                      std::to_string(chain.relation().size()) + " rows";
            break;
          }
          case 3:
          case 4: {
            SigmaN sn = sigma_n(n_param);
            AttrSet d = sn.schema.set_of(detail::split_names(d_text));
            if (lemma == 3) {
              payload["schedule"] = schedule_json(lemma3_schedule(sn, d), sn.schema);
              Relation r = lemma3_model(sn, d);
              payload["rows"] = r.size();
              payload["csv"] = write_csv(r);
              summary = "structured model with " + std::to_string(r.size()) + " rows";
            } else {
              Relation r = lemma4_model(sn, d);
              payload["rows"] = r.size();
              payload["csv"] = write_csv(r);
              summary = "rewritten model with " + std::to_string(r.size()) + " rows";
            }
            break;
          }
          case 5: {
            SigmaN sn = sigma_n(n_param);
            Lemma5Models ms = lemma5_models(sn, i_param);
            payload["i"] = i_param;
            payload["r_csv"] = write_csv(ms.r);
            payload["r_prime_csv"] = write_csv(ms.r_prime);
            summary = "two models around key(B" + std::to_string(n_param) + " A1)";
            break;
          }
          case 6: {
            SigmaN sn = sigma_n(n_param);
            Lemma6Models ms = lemma6_models(sn, i_param);
            payload["i"] = i_param;
            payload["r0_csv"] = write_csv(ms.r0);
            payload["r1_csv"] = write_csv(ms.r1);
            if (ms.r2) payload["r2_csv"] = write_csv(*ms.r2);
            if (ms.r3) payload["r3_csv"] = write_csv(*ms.r3);
            summary = "models around ind(A1 ; B1)";
            break;
          }
        }
      } else {
        throw ValidationError("paper needs exactly one of --lemma, --sigma-n, --kary-demo");
      }
    }
  } catch (const ParseError& e) {
    out << json{{"error", e.what()}}.dump(pretty ? 2 : -1) << "\n";
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const ValidationError& e) {
    out << json{{"error", e.what()}}.dump(pretty ? 2 : -1) << "\n";
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const InternalError& e) {
    out << json{{"error", e.what()}}.dump(pretty ? 2 : -1) << "\n";
    err << "internal error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    out << json{{"error", e.what()}}.dump(pretty ? 2 : -1) << "\n";
    err << "internal error: " << e.what() << "\n";
    return 3;
  }

  out << payload.dump(pretty ? 2 : -1) << "\n";
  err << summary << "\n";
  return exit_code;
}

}  // namespace iakr
