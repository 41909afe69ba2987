#include "walt/url_promoter.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include "walt/errors.hpp"
#include "walt/executor.hpp"
#include "walt/synthesizer.hpp"
#include "walt/url.hpp"

namespace walt {

namespace {

bool is_numeric(const std::string& s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c); });
}

int name_score(const std::string& key, const std::string& param) {
  if (key == param) return 2;
  if (param.find(key) != std::string::npos || key.find(param) != std::string::npos) return 1;
  return 0;
}

// URL the trace shows right after the given action.
std::optional<std::string> url_after(const ExecutionTrace& trace, ActionKey key) {
  if (key.action + 1 < static_cast<int>(trace.steps[key.step].actions.size())) {
    return trace.steps[key.step].url;
  }
  if (key.step + 1 < static_cast<int>(trace.steps.size())) return trace.steps[key.step + 1].url;
  return std::nullopt;
}

struct Run {
  int first = 0;
  int last = 0;
  ActionKey first_key;
  ActionKey last_key;
};

std::vector<Run> interaction_runs(const ActionScript& script) {
  std::vector<Run> runs;
  int n = static_cast<int>(script.steps.size());
  for (int i = 0; i < n;) {
    if (!std::holds_alternative<step::Interaction>(script.steps[i].body)) {
      ++i;
      continue;
    }
    int j = i;
    while (j + 1 < n && std::holds_alternative<step::Interaction>(script.steps[j + 1].body)) ++j;
    std::optional<ActionKey> first, last;
    for (int k = i; k <= j; ++k) {
      if (!script.steps[k].source) continue;
      if (!first) first = script.steps[k].source;
      last = script.steps[k].source;
    }
    if (first) runs.push_back({i, j, *first, *last});
    i = j + 1;
  }
  std::stable_sort(runs.begin(), runs.end(),
                   [](const Run& a, const Run& b) { return a.last - a.first > b.last - b.first; });
  return runs;
}

bool side_effecting(const ExecutionTrace& trace, const Run& run, const Url& pre, const Url& post) {
  bool effect = false;
  for_each_action(trace, [&](ActionKey key, const ActionRecord& r) {
    if (key < run.first_key || run.last_key < key) return;
    if (r.http_method && *r.http_method != "GET") effect = true;
  });
  auto before = pre.path_segments();
  for (const auto& seg : post.path_segments()) {
    if (is_numeric(seg) && std::find(before.begin(), before.end(), seg) == before.end()) effect = true;
  }
  return effect;
}

std::optional<UrlTemplate> explain(const Url& pre, const Url& post, int evidence_step,
                                   const std::map<std::string, std::string>& bindings,
                                   const std::vector<std::string>& params) {
  UrlTemplate t;
  t.origin = post.origin();
  std::set<std::string> usable(params.begin(), params.end());

  for (const auto& seg : post.path_segments()) {
    std::vector<std::string> hits;
    for (const auto& [name, value] : bindings) {
      if (usable.count(name) && value == seg) hits.push_back(name);
    }
    if (hits.size() > 1) return std::nullopt;
    t.base_path += "/";
    if (hits.size() == 1) {
      t.base_path += "{" + hits[0] + "}";
      t.evidence[hits[0]] = evidence_step;
    } else {
      t.base_path += encode_path_segment(seg);
    }
  }
  if (t.base_path.empty() || (post.path.size() > 1 && post.path.back() == '/')) t.base_path += "/";

  // Best-scoring binding per query param; ambiguity refuses.
  std::vector<std::optional<std::string>> chosen(post.query.size());
  std::vector<int> scores(post.query.size(), -1);
  for (std::size_t i = 0; i < post.query.size(); ++i) {
    const auto& [key, value] = post.query[i];
    int best = -1;
    bool tie = false;
    for (const auto& [name, bound] : bindings) {
      if (!usable.count(name) || url_decode(bound) != value) continue;
      int s = name_score(key, name);
      if (s > best) {
        best = s;
        chosen[i] = name;
        tie = false;
      } else if (s == best) {
        tie = true;
      }
    }
    if (tie) return std::nullopt;
    scores[i] = best;
  }
  // A binding claimed by several params goes to the best key name.
  for (std::size_t i = 0; i < chosen.size(); ++i) {
    if (!chosen[i]) continue;
    for (std::size_t j = 0; j < chosen.size(); ++j) {
      if (i == j || chosen[j] != chosen[i]) continue;
      if (scores[i] == scores[j]) return std::nullopt;
      if (scores[j] < scores[i]) chosen[j].reset();
    }
  }
  for (std::size_t i = 0; i < post.query.size(); ++i) {
    const auto& [key, value] = post.query[i];
    if (chosen[i]) {
      t.query_params.push_back({key, "{" + *chosen[i] + "}"});
      t.evidence[*chosen[i]] = evidence_step;
      continue;
    }
    auto before = pre.param(key);
    if (!before || *before != value) return std::nullopt;
    t.query_params.push_back({key, form_encode(value)});
  }
  return t;
}

}  // namespace

std::string UrlTemplate::to_string() const {
  std::string out = origin + base_path;
  for (std::size_t i = 0; i < query_params.size(); ++i) {
    out += (i == 0 ? "?" : "&") + form_encode(query_params[i].key) + "=" + query_params[i].value_template;
  }
  return out;
}

std::optional<InferredTemplate> infer_url_template(const ActionScript& script, const StabilizedTrace& stab) {
  const auto& trace = stab.base;
  auto bindings = effective_bindings(stab);
  for (const auto& run : interaction_runs(script)) {
    auto post_text = url_after(trace, run.last_key);
    if (!post_text) continue;
    auto pre = parse_url(trace.steps[run.first_key.step].url);
    auto post = parse_url(*post_text);
    if (!pre || !post || same_url(pre->to_string(), post->to_string())) continue;
    if (side_effecting(trace, run, *pre, *post)) return std::nullopt;
    int evidence_step = run.last_key.step + 1 < static_cast<int>(trace.steps.size()) ? run.last_key.step + 1
                                                                                      : run.last_key.step;
    auto url = explain(*pre, *post, evidence_step, bindings, script.params);
    if (!url) return std::nullopt;
    InferredTemplate inferred{{run.first, run.last}, std::move(*url)};
    if (inferred.range.first > 0 &&
        std::holds_alternative<step::Navigation>(script.steps[inferred.range.first - 1].body)) {
      --inferred.range.first;
    }
    // The promoted script must still consume every param.
    auto promoted = apply_promotion(script, inferred);
    auto used = script_placeholders(promoted);
    if (std::set<std::string>(used.begin(), used.end()) !=
        std::set<std::string>(script.params.begin(), script.params.end())) {
      return std::nullopt;
    }
    return inferred;
  }
  return std::nullopt;
}

ActionScript apply_promotion(const ActionScript& script, const InferredTemplate& inferred) {
  ActionScript out;
  out.params = script.params;
  for (int i = 0; i < static_cast<int>(script.steps.size()); ++i) {
    if (i < inferred.range.first || i > inferred.range.last) {
      out.steps.push_back(script.steps[i]);
      continue;
    }
    if (i != inferred.range.first) continue;
    Step nav;
    nav.body = step::Navigation{inferred.url.to_string()};
    nav.description = "Open the parameterized URL directly";
    out.steps.push_back(std::move(nav));
  }
  return out;
}

std::vector<std::string> normalize_items(const std::string& text) {
  std::vector<std::string> items;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string::npos) end = text.size();
    auto line = text.substr(start, end - start);
    auto b = line.find_first_not_of(" \t\r");
    if (b != std::string::npos) {
      auto e = line.find_last_not_of(" \t\r");
      items.push_back(line.substr(b, e - b + 1));
    }
    start = end + 1;
  }
  return items;
}

PromotionResult promote_script(const ActionScript& script, const InferredTemplate& inferred,
                               const BackendFactory& factory, const Inputs& demo_inputs, Reasoner* reasoner) {
  if (!factory) throw BackendUnavailable("no backend factory for the equivalence replay");
  auto candidate = apply_promotion(script, inferred);
  auto replay = [&](const ActionScript& s) {
    auto backend = factory();
    if (!backend) throw BackendUnavailable("backend factory returned no session");
    auto outcome = execute_script(s, demo_inputs, *backend, reasoner);
    if (outcome.outputs.empty() && outcome.succeeded()) outcome.outputs["__dom"] = backend->dom_snapshot();
    return outcome;
  };
  auto original = replay(script);
  auto promoted = replay(candidate);
  if (!original.succeeded() || !promoted.succeeded()) {
    return {script, false, "equivalence replay failed"};
  }
  if (original.outputs.size() != promoted.outputs.size()) return {script, false, "output sets differ"};
  for (const auto& [name, text] : original.outputs) {
    auto it = promoted.outputs.find(name);
    if (it == promoted.outputs.end() || normalize_items(it->second) != normalize_items(text)) {
      return {script, false, "extraction '" + name + "' differs after promotion"};
    }
  }
  return {candidate, true, ""};
}

}  // namespace walt
