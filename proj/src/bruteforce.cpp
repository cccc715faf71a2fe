#include "ccl/bruteforce.hpp"

#include <functional>
#include <map>

#include "ccl/error.hpp"

namespace ccl {

namespace {

std::vector<TickInputs> tick_values(const FlatInstance &flat,
                                    const FiniteDomain &domain) {
  std::vector<TickInputs> out{{}};
  for (const Port *p : flat.root_inputs()) {
    auto it = domain.find(p->name);
    if (it == domain.end() || it->second.empty())
      throw Error("BAD_DOMAIN", "no domain values for input port '" + p->name +
                                    "'");
    std::vector<TickInputs> next;
    for (const auto &partial : out)
      for (const auto &v : it->second) {
        TickInputs t = partial;
        t[p->name] = v;
        next.push_back(std::move(t));
      }
    out = std::move(next);
  }
  return out;
}

/// Depth-first over oracle choices: each run is completed with zeros and
/// every later decision forks its remaining alternatives.
void for_each_oracle(const FlatInstance &flat, const InputSeq &in,
                     const std::function<void(Trace)> &f) {
  std::function<void(std::vector<int>)> go = [&](std::vector<int> prefix) {
    Trace t = run(flat, in, Oracle::prefix(prefix));
    std::vector<int> used = t.oracle_used.choices;
    std::vector<Decision> ds = t.decisions;
    f(std::move(t));
    for (std::size_t j = ds.size(); j-- > prefix.size();)
      for (int alt = 1; alt < ds[j].count; ++alt) {
        std::vector<int> p(used.begin(), used.begin() + j);
        p.push_back(alt);
        go(std::move(p));
      }
  };
  go({});
}

} // namespace

std::vector<BruteRun> enumerate_runs(const FlatInstance &flat,
                                     const FiniteDomain &domain, int length,
                                     std::size_t cap) {
  auto ticks = tick_values(flat, domain);
  double combos = 1;
  for (int k = 0; k < length; ++k)
    combos *= double(ticks.size());
  if (combos > double(cap))
    throw Error("CAP_EXCEEDED", "domain has more than " + std::to_string(cap) +
                                    " input sequences");
  std::vector<BruteRun> runs;
  std::vector<std::size_t> idx(std::size_t(std::max(length, 0)), 0);
  while (true) {
    InputSeq in;
    for (std::size_t i : idx)
      in.push_back(ticks[i]);
    for_each_oracle(flat, in, [&](Trace t) {
      if (runs.size() >= cap)
        throw Error("CAP_EXCEEDED",
                    "more than " + std::to_string(cap) + " runs");
      std::vector<int> o = t.oracle_used.choices;
      runs.push_back({in, std::move(o), std::move(t)});
    });
    std::size_t k = idx.size();
    while (k > 0 && ++idx[k - 1] == ticks.size())
      idx[--k] = 0;
    if (k == 0)
      break;
  }
  return runs;
}

std::string path_class(const Trace &t) {
  auto ev = path_events(t);
  return prefix_key(ev, ev.size());
}

std::set<std::string> feasible_path_classes(const std::vector<BruteRun> &runs) {
  std::set<std::string> out;
  for (const auto &r : runs)
    out.insert(path_class(r.trace));
  return out;
}

namespace {

using Outs = std::vector<std::map<std::string, Value>>;

Outs concrete_outputs(const Trace &t) {
  Outs o;
  for (const auto &tick : t.ticks) {
    std::map<std::string, Value> m;
    for (const auto &[port, v] : tick.outputs)
      m[port] = v.conc;
    o.push_back(std::move(m));
  }
  return o;
}

} // namespace

std::set<InputSeq> brute_diff(const FlatInstance &m1, const FlatInstance &m2,
                              const FiniteDomain &domain, int length,
                              std::size_t cap) {
  std::map<InputSeq, std::set<Outs>> o1, o2;
  for (auto &r : enumerate_runs(m1, domain, length, cap))
    o1[r.inputs].insert(concrete_outputs(r.trace));
  for (auto &r : enumerate_runs(m2, domain, length, cap))
    o2[r.inputs].insert(concrete_outputs(r.trace));
  std::set<InputSeq> out;
  for (const auto &[in, outs] : o1)
    for (const auto &o : outs)
      if (!o2[in].count(o)) {
        out.insert(in);
        break;
      }
  return out;
}

FiniteDomain domain_from_json(const json &j, const FlatInstance &flat) {
  if (!j.is_object())
    throw Error("BAD_DOMAIN", "domain must be a JSON object");
  FiniteDomain d;
  for (const Port *p : flat.root_inputs()) {
    if (!j.contains(p->name) || !j.at(p->name).is_array() ||
        j.at(p->name).empty())
      throw Error("BAD_DOMAIN",
                  "domain needs a non-empty list for port '" + p->name + "'");
    for (const auto &v : j.at(p->name))
      d[p->name].push_back(value_from_json(v, p->type, *flat.model));
  }
  for (const auto &[k, v] : j.items())
    if (!d.count(k))
      throw Error("BAD_DOMAIN", "'" + k + "' is not a root input port");
  return d;
}

json domain_to_json(const FiniteDomain &d) {
  json j = json::object();
  for (const auto &[port, vs] : d) {
    json a = json::array();
    for (const auto &v : vs)
      a.push_back(value_to_json(v));
    j[port] = a;
  }
  return j;
}

} // namespace ccl
