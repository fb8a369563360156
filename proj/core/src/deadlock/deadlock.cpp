#include "c2ao/deadlock/deadlock.hpp"

#include <functional>
#include <map>
#include <optional>

namespace c2ao::deadlock {

const char* to_string(Verdict v) {
  return v == Verdict::DeadlockFree ? "deadlock-free for every extractable main block" : "unresolved";
}

namespace {

using model::Method;
using model::ModelClass;
using model::Stmt;
using model::Type;

/// Where a future-valued variable got its value.
struct Origin {
  enum class Kind { Call, Param, Unknown };
  Kind kind = Kind::Unknown;
  std::string param;
  MethodId target;  // Call: resolved callee, empty when unresolvable
  std::string target_class;
  bool fresh = false;  // Call on an object created in the same body with harmless arguments
};

struct CallSite {
  MethodId target;
  std::vector<std::pair<std::string, std::vector<Origin>>> future_args;
};

struct Facts {
  MethodId id;
  bool has_sync = false;
  bool takes_future_params = false;
  std::vector<std::pair<std::string, std::vector<Origin>>> synced;  // per synced variable
  std::vector<Origin> blocking;  // futures read by a get that no earlier await covers
  std::vector<CallSite> calls;
};

class Analyzer {
 public:
  explicit Analyzer(const model::Model& m) : m_(m) {
    for (const auto& c : m.classes) {
      bool all_free = true;
      for (const auto& meth : c.methods) {
        if (syncs(meth.body)) all_free = false;
      }
      sync_free_class_[c.name] = all_free;
    }
    for (const auto& c : m.classes) {
      for (const auto& meth : c.methods) facts_.push_back(analyze(&c, meth.params, meth.body, c.name + "." + meth.name));
    }
    if (m.main_block) main_ = analyze(nullptr, {}, *m.main_block, "main block");
    compute_releasable();
  }

  /// Objects of the class are never held forever by one of their own gets.
  bool releasable(const std::string& cls) const { return releasable_.count(cls) > 0; }

  const std::vector<Facts>& facts() const { return facts_; }
  const std::optional<Facts>& main() const { return main_; }

  static bool syncs(const std::vector<Stmt>& body) {
    bool s = false;
    model::for_each_stmt(body, [&](const Stmt& st) {
      if (st.kind == Stmt::Kind::Await || st.kind == Stmt::Kind::Get ||
          (st.kind == Stmt::Kind::Return && !st.future.empty())) {
        s = true;
      }
    });
    return s;
  }

 private:
  const ModelClass* class_for_type(const Type& t) const {
    if (t.kind != Type::Kind::Ref) return nullptr;
    if (const ModelClass* c = m_.find_class(t.ref)) return c;
    return m_.implementor(t.ref);
  }

  Facts analyze(const ModelClass* cls, const std::vector<model::Param>& params, const std::vector<Stmt>& body,
                const MethodId& id) {
    Facts f;
    f.id = id;
    f.has_sync = syncs(body);
    std::map<std::string, Type> types;
    if (cls) {
      for (const auto& p : cls->params) types[p.name] = p.type;
      for (const auto& fl : cls->fields) types[fl.name] = fl.type;
    }
    std::set<std::string> param_futs;
    for (const auto& p : params) {
      types[p.name] = p.type;
      if (p.type.is_fut()) {
        f.takes_future_params = true;
        param_futs.insert(p.name);
      }
    }
    model::for_each_stmt(body, [&](const Stmt& s) {
      if (s.decl_type && !s.target_is_field) types[s.target] = *s.decl_type;
    });

    // Objects created in this body, by variable; a variable also assigned
    // by anything other than `new` is not fresh.
    std::map<std::string, std::vector<const Stmt*>> news;
    std::set<std::string> other_writes;
    std::map<std::string, std::vector<Origin>> origins;
    for (const auto& p : param_futs) origins[p].push_back({Origin::Kind::Param, p, {}, {}, false});

    model::for_each_stmt(body, [&](const Stmt& s) {
      if (s.kind == Stmt::Kind::New && !s.target_is_field) news[s.target].push_back(&s);
      else if ((s.kind == Stmt::Kind::Assign || s.kind == Stmt::Kind::Get || s.kind == Stmt::Kind::AsyncCall) &&
               !s.target.empty()) {
        other_writes.insert(s.target);
      }
    });

    auto harmless_new = [&](const Stmt& n) {
      for (const auto& a : n.args) {
        if (a->kind == Expr::Kind::This) return false;
        Names names = collect_names(a);
        if (names.this_ref) return false;
        for (const auto& v : names.vars) {
          auto it = types.find(v);
          if (it == types.end()) continue;
          if (it->second.is_fut()) return false;
          if (it->second.kind == Type::Kind::Ref) {
            const ModelClass* c = class_for_type(it->second);
            if (!c || !sync_free_class_.at(c->name)) return false;
          }
        }
      }
      return true;
    };

    auto resolve = [&](const Stmt& s, Origin& o) {
      o.kind = Origin::Kind::Call;
      const ModelClass* target = nullptr;
      if (s.callee == "this") {
        target = cls;
      } else if (auto nt = news.find(s.callee); nt != news.end() && !other_writes.count(s.callee)) {
        std::set<std::string> classes;
        bool ok = true;
        for (const Stmt* n : nt->second) {
          classes.insert(n->cls);
          ok = ok && harmless_new(*n);
        }
        if (classes.size() == 1) target = m_.find_class(*classes.begin());
        bool fut_args = false;
        for (const auto& a : s.args) {
          for (const auto& v : collect_names(a).vars) {
            auto it = types.find(v);
            if (it != types.end() && it->second.is_fut()) fut_args = true;
          }
        }
        o.fresh = ok && target && !fut_args;
      } else if (auto it = types.find(s.callee); it != types.end()) {
        target = class_for_type(it->second);
      }
      if (target && target->find(s.method)) {
        o.target = target->name + "." + s.method;
        o.target_class = target->name;
      }
    };

    model::for_each_stmt(body, [&](const Stmt& s) {
      if (s.kind != Stmt::Kind::AsyncCall) return;
      Origin o;
      resolve(s, o);
      CallSite site;
      site.target = o.target;
      for (const auto& a : s.args) {
        if (a->kind != Expr::Kind::Var) continue;
        auto it = types.find(a->name);
        if (it == types.end() || !it->second.is_fut()) continue;
        site.future_args.push_back({a->name, {}});
      }
      f.calls.push_back(std::move(site));
      origins[s.target].push_back(o);
    });
    // Future arguments are resolved after all origins are known.
    for (auto& site : f.calls) {
      for (auto& [name, os] : site.future_args) os = origin_of(origins, name);
    }

    std::set<std::string> seen;
    model::for_each_stmt(body, [&](const Stmt& s) {
      std::vector<std::string> vars;
      if (s.kind == Stmt::Kind::Await) vars = s.guard;
      if (s.kind == Stmt::Kind::Get || (s.kind == Stmt::Kind::Return && !s.future.empty())) vars.push_back(s.future);
      for (const auto& v : vars) {
        if (seen.insert(v).second) f.synced.push_back({v, origin_of(origins, v)});
      }
    });
    // Awaits only cover later gets in the same list or a nested one.
    std::function<void(const std::vector<Stmt>&, std::set<std::string>)> blocking =
        [&](const std::vector<Stmt>& list, std::set<std::string> awaited) {
          for (const auto& s : list) {
            if (s.kind == Stmt::Kind::Await) awaited.insert(s.guard.begin(), s.guard.end());
            bool reads = s.kind == Stmt::Kind::Get || (s.kind == Stmt::Kind::Return && !s.future.empty());
            if (reads && !awaited.count(s.future)) {
              for (const auto& o : origin_of(origins, s.future)) f.blocking.push_back(o);
            }
            blocking(s.body, awaited);
            blocking(s.else_body, awaited);
          }
        };
    blocking(body, {});
    return f;
  }

  void compute_releasable() {
    std::set<MethodId> sync_free;
    for (const auto& f : facts_) {
      if (!f.has_sync) sync_free.insert(f.id);
    }
    for (bool changed = true; changed;) {
      changed = false;
      for (const auto& c : m_.classes) {
        if (releasable_.count(c.name)) continue;
        bool ok = true;
        for (const auto& f : facts_) {
          if (f.id.compare(0, c.name.size() + 1, c.name + ".") != 0) continue;
          for (const auto& o : f.blocking) {
            bool fine = o.kind == Origin::Kind::Call && !o.target.empty() &&
                        (o.fresh || (sync_free.count(o.target) && releasable_.count(o.target_class)));
            if (!fine) ok = false;
          }
        }
        if (ok) {
          releasable_.insert(c.name);
          changed = true;
        }
      }
    }
  }

  static std::vector<Origin> origin_of(const std::map<std::string, std::vector<Origin>>& origins,
                                       const std::string& v) {
    auto it = origins.find(v);
    if (it == origins.end() || it->second.empty()) return {Origin{}};
    return it->second;
  }

  const model::Model& m_;
  std::map<std::string, bool> sync_free_class_;
  std::set<std::string> releasable_;
  std::vector<Facts> facts_;
  std::optional<Facts> main_;
};

/// Every origin of every synced future is acceptable under `ok`.
bool synced_ok(const Facts& f, const std::function<bool(const Origin&)>& ok) {
  for (const auto& [v, os] : f.synced) {
    for (const auto& o : os) {
      if (!ok(o)) return false;
    }
  }
  return true;
}

std::string describe(const Origin& o) {
  switch (o.kind) {
    case Origin::Kind::Param: return "parameter " + o.param;
    case Origin::Kind::Call: return o.target.empty() ? "unresolved call" : o.target + (o.fresh ? " (fresh object)" : "");
    case Origin::Kind::Unknown: break;
  }
  return "unknown";
}

}  // namespace

SyncGraph build_sync_graph(const model::Model& model) {
  Analyzer a(model);
  SyncGraph g;
  for (const auto& f : a.facts()) {
    g.nodes.push_back(f.id);
    if (f.has_sync) g.has_sync.insert(f.id);
    if (f.takes_future_params) g.takes_future_params.insert(f.id);
    std::set<MethodId> targets;
    for (const auto& [v, os] : f.synced) {
      for (const auto& o : os) {
        if (o.kind == Origin::Kind::Call && !o.target.empty()) targets.insert(o.target);
      }
    }
    for (const auto& t : targets) g.edges.push_back({f.id, t});
  }
  return g;
}

Classification classify(const model::Model& model) {
  Analyzer a(model);
  std::set<MethodId> sync_free;
  for (const auto& f : a.facts()) {
    if (!f.has_sync) sync_free.insert(f.id);
  }
  Classification out;
  for (const auto& f : a.facts()) {
    bool free = !f.has_sync || synced_ok(f, [&](const Origin& o) {
      if (o.kind != Origin::Kind::Call || o.target.empty()) return false;
      return o.fresh || (sync_free.count(o.target) > 0 && a.releasable(o.target_class));
    });
    (free ? out.free : out.unknown).insert(f.id);
  }
  return out;
}

Justification justify(const model::Model& model, const Classification& c) {
  Analyzer a(model);
  Justification j;
  j.justified = c.free;

  // Call sites feeding each method's future parameters.
  std::map<MethodId, std::vector<std::pair<MethodId, std::pair<std::string, std::vector<Origin>>>>> feeds;
  auto collect = [&](const Facts& f) {
    for (const auto& site : f.calls) {
      for (const auto& arg : site.future_args) feeds[site.target].push_back({f.id, arg});
    }
  };
  for (const auto& f : a.facts()) collect(f);
  if (a.main()) collect(*a.main());

  auto origin_safe = [&](const Origin& o) {
    return o.kind == Origin::Kind::Call && !o.target.empty() &&
           (o.fresh || (j.justified.count(o.target) > 0 && a.releasable(o.target_class)));
  };

  for (bool changed = true; changed;) {
    changed = false;
    for (const auto& f : a.facts()) {
      if (j.justified.count(f.id)) continue;
      bool ok = synced_ok(f, [&](const Origin& o) { return o.kind == Origin::Kind::Param || origin_safe(o); });
      if (ok && f.takes_future_params) {
        for (const auto& [caller, arg] : feeds[f.id]) {
          for (const auto& o : arg.second) {
            // A feed from the method itself is an earlier instance: futures
            // passed as arguments already exist, so such chains are finite.
            bool fed_by_call = o.kind == Origin::Kind::Call && !o.target.empty() &&
                               (j.justified.count(o.target) || o.target == f.id) &&
                               (o.fresh || a.releasable(o.target_class));
            if (!fed_by_call) ok = false;
          }
        }
      }
      if (ok) {
        j.justified.insert(f.id);
        changed = true;
      }
    }
  }

  std::string text;
  for (const auto& f : a.facts()) {
    if (!c.unknown.count(f.id)) continue;
    std::vector<FutureSource> srcs;
    for (const auto& [caller, arg] : feeds[f.id]) {
      for (const auto& o : arg.second) srcs.push_back({caller, arg.first, describe(o)});
    }
    text += f.id + (j.justified.count(f.id) ? ": safe" : ": unresolved");
    if (f.takes_future_params) {
      text += "; future arguments:";
      if (srcs.empty()) text += " (no call sites)";
      for (const auto& s : srcs) text += " " + s.argument + " from " + s.origin + " in " + s.caller + ";";
    }
    text += "\n";
    j.sources.push_back({f.id, std::move(srcs)});
    if (!j.justified.count(f.id)) j.unresolved.insert(f.id);
  }
  j.verdict = j.unresolved.empty() ? Verdict::DeadlockFree : Verdict::Unresolved;
  if (j.verdict == Verdict::DeadlockFree) {
    text += "Every future a synchronizing method waits on, and every future passed into a method taking "
            "future parameters, is produced by a call on a freshly created object or by a call to a method "
            "already shown safe on an object that no blocking get can hold forever, so no cycle of future "
            "dependencies can form: " +
            std::string(to_string(j.verdict)) + ".\n";
  } else {
    text += "Verdict: unresolved (" + std::to_string(j.unresolved.size()) + " method(s) without a provenance argument).\n";
  }
  j.text = std::move(text);
  return j;
}

}  // namespace c2ao::deadlock
