#include "solver.hpp"

#include <algorithm>

namespace dspl::detail {

Index::Index(const FeatureModel& fm) : model(&fm), ids(fm.ids_by_name()) {
  const auto n = ids.size();
  for (std::size_t i = 0; i < n; ++i) pos.emplace(ids[i], static_cast<int>(i));
  parent.assign(n, -1);
  children.resize(n);
  mandatory.assign(n, 0);
  member_group.assign(n, -1);
  slots.resize(n);
  dead.assign(n, 0);
  root = pos.at(fm.root());
  for (std::size_t i = 0; i < n; ++i) {
    const Feature& f = fm.feature(ids[i]);
    if (f.parent) {
      parent[i] = pos.at(*f.parent);
      mandatory[i] = f.variation == Variation::Mandatory;
    }
    for (const auto& c : fm.children(f.id)) children[i].push_back(pos.at(c));
    if (f.group) {
      GroupIx g;
      g.owner = static_cast<int>(i);
      g.min = static_cast<int>(f.group->min);
      g.max = static_cast<int>(f.group->max);
      for (const auto& m : f.group->members) g.members.push_back(pos.at(m));
      std::sort(g.members.begin(), g.members.end());
      for (int m : g.members) member_group[m] = static_cast<int>(groups.size());
      groups.push_back(std::move(g));
    }
    for (const auto& [name, spec] : f.attributes) slots[i].push_back(Slot{name, spec.domain.values()});
  }
  for (const auto& c : fm.constraints()) {
    if (const auto* r = std::get_if<Requires>(&c)) {
      requires_edges.emplace_back(pos.at(r->feature), pos.at(r->required));
    } else if (const auto* x = std::get_if<Excludes>(&c)) {
      excludes_edges.emplace_back(pos.at(x->feature), pos.at(x->excluded));
    } else {
      const auto& p = std::get<AttrPredicate>(c);
      restrict_slot(pos.at(p.feature), p.attr, p.op, p.literal);
    }
  }
}

bool Index::restrict_slot(int feature, const std::string& attr, Comparator op, const Value& literal) {
  for (auto& slot : slots[feature]) {
    if (slot.attr != attr) continue;
    std::erase_if(slot.allowed, [&](const Value& v) { return !compare(v, op, literal); });
    if (slot.allowed.empty()) dead[feature] = 1;
    return true;
  }
  return false;
}

namespace {

class Propagator {
 public:
  Propagator(const Index& ix, Assignment& a) : ix_(ix), a_(a) {}

  std::optional<Conflict> run() {
    do {
      changed_ = false;
      if (!pass()) return conflict_;
    } while (changed_);
    return std::nullopt;
  }

 private:
  bool set(int f, signed char v, const std::string& site) {
    if (a_[f] == v) return true;
    if (a_[f] == kUndecided) {
      a_[f] = v;
      changed_ = true;
      return true;
    }
    conflict_ = Conflict{f, site};
    return false;
  }

  bool fail(int f, const std::string& site) {
    conflict_ = Conflict{f, site};
    return false;
  }

  const std::string& id(int f) const { return ix_.ids[f]; }

  bool pass() {
    if (!set(ix_.root, 1, "root " + id(ix_.root))) return false;
    const int n = static_cast<int>(a_.size());
    for (int f = 0; f < n; ++f) {
      if (ix_.dead[f] && !set(f, 0, "attribute domain of " + id(f))) return false;
      if (a_[f] == 1) {
        if (ix_.parent[f] >= 0 && !set(ix_.parent[f], 1, "parent of " + id(f))) return false;
        for (int c : ix_.children[f]) {
          if (ix_.mandatory[c] && !set(c, 1, "mandatory " + id(c) + " under " + id(f))) return false;
        }
      } else if (a_[f] == 0) {
        for (int c : ix_.children[f]) {
          if (!set(c, 0, "subtree of " + id(f))) return false;
        }
        if (ix_.parent[f] >= 0 && ix_.mandatory[f] &&
            !set(ix_.parent[f], 0, "mandatory " + id(f) + " under " + id(ix_.parent[f]))) {
          return false;
        }
      }
    }
    for (auto [from, to] : ix_.requires_edges) {
      std::string site = "requires " + id(from) + " -> " + id(to);
      if (a_[from] == 1 && !set(to, 1, site)) return false;
      if (a_[to] == 0 && !set(from, 0, site)) return false;
    }
    for (auto [x, y] : ix_.excludes_edges) {
      std::string site = "excludes " + id(x) + ", " + id(y);
      if (a_[x] == 1 && !set(y, 0, site)) return false;
      if (a_[y] == 1 && !set(x, 0, site)) return false;
    }
    for (const auto& g : ix_.groups) {
      int sel = 0;
      int und = 0;
      for (int m : g.members) {
        sel += a_[m] == 1;
        und += a_[m] == kUndecided;
      }
      std::string site = "group at " + id(g.owner);
      if (a_[g.owner] == 1) {
        if (sel > g.max || sel + und < g.min) return fail(g.owner, site);
        if (und > 0 && sel == g.max) {
          for (int m : g.members) {
            if (a_[m] == kUndecided) set(m, 0, site);
          }
        } else if (und > 0 && sel + und == g.min) {
          for (int m : g.members) {
            if (a_[m] == kUndecided) set(m, 1, site);
          }
        }
      } else if (a_[g.owner] == kUndecided && (sel > g.max || sel + und < g.min)) {
        set(g.owner, 0, site);
      }
    }
    return true;
  }

  const Index& ix_;
  Assignment& a_;
  bool changed_ = false;
  std::optional<Conflict> conflict_;
};

bool prefers_select(const Index& ix, const Assignment& a, int f) {
  int g = ix.member_group[f];
  if (g < 0) return false;
  int sel = 0;
  for (int m : ix.groups[g].members) sel += a[m] == 1;
  return sel < ix.groups[g].min;
}

bool dfs(const Index& ix, Assignment& a, const std::function<bool(const Assignment&)>& visit) {
  if (propagate(ix, a)) return true;
  auto it = std::find(a.begin(), a.end(), kUndecided);
  if (it == a.end()) return visit(a);
  int f = static_cast<int>(it - a.begin());
  signed char first = prefers_select(ix, a, f) ? 1 : 0;
  for (signed char v : {first, static_cast<signed char>(1 - first)}) {
    Assignment b = a;
    b[f] = v;
    if (!dfs(ix, b, visit)) return false;
  }
  return true;
}

}  // namespace

std::optional<Conflict> propagate(const Index& ix, Assignment& a) { return Propagator(ix, a).run(); }

bool search(const Index& ix, Assignment start, const std::function<bool(const Assignment&)>& visit) {
  return dfs(ix, start, visit);
}

std::vector<const Index::Slot*> selected_slots(const Index& ix, const Assignment& a, std::vector<int>* owners) {
  std::vector<const Index::Slot*> out;
  for (std::size_t f = 0; f < a.size(); ++f) {
    if (a[f] != 1) continue;
    for (const auto& s : ix.slots[f]) {
      out.push_back(&s);
      if (owners) owners->push_back(static_cast<int>(f));
    }
  }
  return out;
}

Configuration make_configuration(const Index& ix, const Assignment& a, const std::vector<std::size_t>& choice) {
  Configuration cfg;
  cfg.model_id = ix.model->model_id();
  std::size_t k = 0;
  for (std::size_t f = 0; f < a.size(); ++f) {
    if (a[f] != 1) continue;
    cfg.selected.insert(ix.ids[f]);
    for (const auto& s : ix.slots[f]) {
      cfg.bindings.emplace(BindingKey{ix.ids[f], s.attr}, s.allowed.at(choice.at(k)));
      ++k;
    }
  }
  return cfg;
}

}  // namespace dspl::detail
