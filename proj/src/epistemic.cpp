#include "byzcone/epistemic.hpp"

#include <algorithm>
#include <deque>
#include <sstream>

namespace byzcone {

using Op = Formula::Op;

InterpretedSystem::InterpretedSystem(Alphabet alphabet, RunUniverse universe, Valuation valuation)
    : alphabet_(std::move(alphabet)),
      universe_(std::move(universe)),
      valuation_(std::move(valuation)),
      classIds_(static_cast<std::size_t>(alphabet_.agents())),
      members_(static_cast<std::size_t>(alphabet_.agents())),
      pointClass_(static_cast<std::size_t>(alphabet_.agents())) {
    for (std::size_t r = 0; r < universe_.size(); ++r) index(r);
}

std::size_t InterpretedSystem::pointCount() const {
    std::size_t n = 0;
    for (const auto& r : universe_) n += static_cast<std::size_t>(r.time()) + 1;
    return n;
}

std::size_t InterpretedSystem::addRun(Run r) {
    universe_.push_back(std::move(r));
    index(universe_.size() - 1);
    return universe_.size() - 1;
}

void InterpretedSystem::index(std::size_t runIdx) {
    const Run& r = universe_[runIdx];
    for (int k = 1; k <= alphabet_.agents(); ++k) {
        const AgentId i(k);
        auto& ids = classIds_[i.index()];
        auto& mem = members_[i.index()];
        auto& pc = pointClass_[i.index()];
        pc.resize(universe_.size());
        for (Timestamp t = 0; t <= r.time(); ++t) {
            auto [it, fresh] = ids.try_emplace(r.localHistory(i, t), mem.size());
            if (fresh) mem.emplace_back();
            mem[it->second].push_back(Point{runIdx, t});
            pc[runIdx].push_back(it->second);
        }
    }
}

const std::vector<Point>& InterpretedSystem::classOf(AgentId agent, const Point& p) const {
    const auto id = pointClass_.at(agent.index()).at(p.run).at(static_cast<std::size_t>(p.time));
    return members_[agent.index()][id];
}

const std::vector<std::vector<Point>>& InterpretedSystem::classes(AgentId agent) const {
    return members_.at(agent.index());
}

namespace {

bool recorded(const Alphabet& ab, const Run& r, AgentId i, Timestamp m, const LocalHap& o,
              bool correct) {
    if (m < 1 || m > r.time() || !r.triggered(i, m - 1)) return false;
    const auto& env = r.betaEnv(m - 1);
    if (correct) {
        for (const auto& h : env)
            if (isCorrectEvent(h) && ownerOf(h) == i && localize(ab, h) == o) return true;
        for (const auto& a : r.betaAgent(i, m - 1))
            if (localize(ab, a) == o) return true;
        return false;
    }
    for (const auto& h : env)
        if (isByzantine(h) && ownerOf(h) == i) {
            auto rec = localRecordOf(ab, h);
            if (rec && *rec == o) return true;
        }
    return false;
}

bool occurredCorrectlyBy(const Alphabet& ab, const Run& r, Timestamp t, AgentId i, const LocalHap& o) {
    for (Timestamp m = 1; m <= t; ++m)
        if (recorded(ab, r, i, m, o, true)) return true;
    return false;
}

}  // namespace

bool evalAtom(const InterpretedSystem& sys, std::size_t runIdx, Timestamp t, const Formula& atom) {
    const Run& r = sys.run(runIdx);
    if (t < 0 || t > r.time())
        throw std::out_of_range("point " + std::to_string(t) + " beyond run of length " +
                                std::to_string(r.time()));
    const auto& ab = sys.alphabet();
    switch (atom.op) {
        case Op::True: return true;
        case Op::False: return false;
        case Op::Correct: return r.nodeCorrect(atom.agent, t);
        case Op::CorrectAt: return atom.time >= 0 && atom.time <= t && r.nodeCorrect(atom.agent, atom.time);
        case Op::FakeAt: return atom.time <= t && recorded(ab, r, atom.agent, atom.time, atom.hap, false);
        case Op::OccurredCorrectlyAt:
            return atom.time <= t && recorded(ab, r, atom.agent, atom.time, atom.hap, true);
        case Op::OccurredCorrectlyBy: return occurredCorrectlyBy(ab, r, t, atom.agent, atom.hap);
        case Op::OccurredCorrectly:
            for (AgentId i : ab.allAgents())
                if (occurredCorrectlyBy(ab, r, t, i, atom.hap)) return true;
            return false;
        case Op::Occurred:
            if (occurredCorrectlyBy(ab, r, t, atom.agent, atom.hap)) return true;
            for (Timestamp m = 1; m <= t; ++m)
                if (recorded(ab, r, atom.agent, m, atom.hap, false)) return true;
            return false;
        case Op::Prop: {
            auto it = sys.valuation().find(atom.name);
            return it != sys.valuation().end() && it->second.count(Point{runIdx, t}) > 0;
        }
        default: throw std::invalid_argument("not an atom: " + render(FormulaPtr(&atom, [](const Formula*) {})));
    }
}

namespace {

TruthTable evalCore(const InterpretedSystem& sys, const FormulaPtr& phi) {
    TruthTable out(sys.universe().size());
    for (std::size_t r = 0; r < out.size(); ++r)
        out[r].resize(static_cast<std::size_t>(sys.run(r).time()) + 1);
    auto fill = [&](auto fn) {
        for (std::size_t r = 0; r < out.size(); ++r)
            for (std::size_t t = 0; t < out[r].size(); ++t) out[r][t] = fn(r, t);
    };
    switch (phi->op) {
        case Op::Not: {
            auto a = evalCore(sys, phi->args[0]);
            fill([&](std::size_t r, std::size_t t) { return !a[r][t]; });
            break;
        }
        case Op::And: {
            auto a = evalCore(sys, phi->args[0]);
            auto b = evalCore(sys, phi->args[1]);
            fill([&](std::size_t r, std::size_t t) { return a[r][t] && b[r][t]; });
            break;
        }
        case Op::K: {
            auto a = evalCore(sys, phi->args[0]);
            for (const auto& cls : sys.classes(phi->agent)) {
                const bool all = std::all_of(cls.begin(), cls.end(), [&](const Point& p) {
                    return a[p.run][static_cast<std::size_t>(p.time)];
                });
                for (const auto& p : cls) out[p.run][static_cast<std::size_t>(p.time)] = all;
            }
            break;
        }
        case Op::Or:
        case Op::Implies:
        case Op::H: return evalCore(sys, expand(phi));
        default:
            fill([&](std::size_t r, std::size_t t) {
                return evalAtom(sys, r, static_cast<Timestamp>(t), *phi);
            });
    }
    return out;
}

}  // namespace

TruthTable InterpretedSystem::evaluate(const FormulaPtr& phi) const {
    return evalCore(*this, expand(phi));
}

bool InterpretedSystem::holds(const FormulaPtr& phi, std::size_t runIdx, Timestamp t) const {
    return evaluate(phi).at(runIdx).at(static_cast<std::size_t>(t));
}

bool localStateEqual(const Run& r1, Timestamp t1, const Run& r2, Timestamp t2, AgentId agent) {
    return r1.localHistory(agent, t1) == r2.localHistory(agent, t2);
}

bool evalK(const InterpretedSystem& sys, std::size_t run, Timestamp t, AgentId agent,
           const FormulaPtr& sub) {
    return sys.holds(f::knows(agent, sub), run, t);
}

bool evalHope(const InterpretedSystem& sys, std::size_t run, Timestamp t, AgentId agent,
              const FormulaPtr& sub) {
    return sys.holds(f::hope(agent, sub), run, t);
}

std::optional<std::pair<Point, Point>> localizationCounterexample(const InterpretedSystem& sys,
                                                                  const FormulaPtr& phi,
                                                                  AgentId agent) {
    const auto table = sys.evaluate(phi);
    for (const auto& cls : sys.classes(agent)) {
        const Point& first = cls.front();
        const bool v = table[first.run][static_cast<std::size_t>(first.time)];
        for (const auto& p : cls)
            if (table[p.run][static_cast<std::size_t>(p.time)] != v) return std::make_pair(first, p);
    }
    return std::nullopt;
}

bool checkLocalized(const InterpretedSystem& sys, const FormulaPtr& phi, AgentId agent) {
    return !localizationCounterexample(sys, phi, agent);
}

std::vector<Node> correctOccurrences(const Alphabet& ab, const Run& run, const LocalHap& o,
                                     Timestamp before) {
    std::vector<Node> out;
    for (Timestamp m = 0; m < before && m < run.time(); ++m)
        for (const auto& h : run.betaEnv(m))
            if (isCorrectEvent(h) && localize(ab, h) == o) out.push_back(Node{ownerOf(h), m});
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

bool checkTheorem2Premise(const Alphabet& ab, const Run& run, const Node& theta, const LocalHap& o) {
    const auto part = partition(ab, run, theta);
    for (const auto& n : correctOccurrences(ab, run, o, theta.time))
        if (part.cone.count(n)) return false;
    return true;
}

bool checkMultipedeBounded(const InterpretedSystem& sys, std::size_t run, const Node& theta,
                           const LocalHap& o) {
    const auto& ab = sys.alphabet();
    const Run& base = sys.run(run);
    for (const auto& other : sys.universe()) {
        if (other.time() < theta.time) continue;
        if (!localStateEqual(base, theta.time, other, theta.time, theta.agent)) continue;
        const auto part = partition(ab, other, theta);
        const auto occ = correctOccurrences(ab, other, o, theta.time);
        if (std::none_of(occ.begin(), occ.end(), [&](const Node& n) { return part.cone.count(n) > 0; }))
            return false;
    }
    return true;
}

bool Theorem3Report::satisfied() const {
    return vacuous || std::all_of(entries.begin(), entries.end(),
                                  [](const Theorem3Entry& e) { return e.witness.has_value(); });
}

namespace {

// Backward search from θ through nodes whose agent is not excluded; returns parents.
std::map<Node, Node> avoidingReach(const CausalGraph& g, const Node& theta,
                                   const std::set<AgentId>& excluded) {
    std::map<Node, Node> parent{{theta, theta}};
    std::deque<Node> queue{theta};
    while (!queue.empty()) {
        Node n = queue.front();
        queue.pop_front();
        for (const auto& p : g.predecessors(n)) {
            if (parent.count(p) || excluded.count(p.agent)) continue;
            parent.emplace(p, n);
            queue.push_back(p);
        }
    }
    return parent;
}

void subsets(const std::vector<AgentId>& pool, std::size_t k, std::size_t from,
             std::set<AgentId>& cur, std::vector<std::set<AgentId>>& out) {
    if (cur.size() == k) {
        out.push_back(cur);
        return;
    }
    for (std::size_t idx = from; idx < pool.size(); ++idx) {
        cur.insert(pool[idx]);
        subsets(pool, k, idx + 1, cur, out);
        cur.erase(pool[idx]);
    }
}

}  // namespace

Theorem3Report checkTheorem3Necessary(const Alphabet& ab, const Run& run, const Node& theta,
                                      const LocalHap& o, int f) {
    if (!nodeCorrect(run, theta))
        throw std::invalid_argument("theta " + toString(theta) + " is not correct");
    const auto graph = buildCausalGraph(ab, run);
    const auto part = partition(run, graph, theta);
    Theorem3Report rep;
    rep.theta = theta;
    rep.faultBound = f;
    for (const auto& n : part.buffer) rep.byz.insert(n.agent);
    if (static_cast<int>(rep.byz.size()) > f)
        throw IntegrityError("fault buffer involves " + std::to_string(rep.byz.size()) +
                             " agents, more than f = " + std::to_string(f));

    std::vector<AgentId> pool;
    for (AgentId a : ab.allAgents())
        if (a != theta.agent && !rep.byz.count(a)) pool.push_back(a);
    const std::size_t k = static_cast<std::size_t>(f) - rep.byz.size();
    if (k > pool.size()) {
        rep.vacuous = true;
        return rep;
    }
    std::vector<std::set<AgentId>> all;
    std::set<AgentId> cur;
    subsets(pool, k, 0, cur, all);

    const auto occ = correctOccurrences(ab, run, o, theta.time);
    for (const auto& s : all) {
        Theorem3Entry e;
        e.excluded = s;
        std::set<AgentId> avoid = s;
        avoid.insert(rep.byz.begin(), rep.byz.end());
        const auto parent = avoidingReach(graph, theta, avoid);
        for (const auto& n : occ) {
            if (!parent.count(n)) continue;
            e.witness = n;
            for (Node cur = n;; cur = parent.at(cur)) {
                e.path.push_back(cur);
                if (cur == theta) break;
            }
            break;
        }
        rep.entries.push_back(std::move(e));
    }
    return rep;
}

std::string renderTruthTable(const InterpretedSystem& sys, const TruthTable& table) {
    std::ostringstream out;
    for (std::size_t r = 0; r < table.size(); ++r) {
        out << "run " << r << ":";
        for (std::size_t t = 0; t < table[r].size(); ++t) out << " " << (table[r][t] ? '1' : '0');
        out << "\n";
    }
    (void)sys;
    return out.str();
}

std::string renderTheorem3(const Theorem3Report& report) {
    auto agents = [](const std::set<AgentId>& s) {
        std::string out = "{";
        bool first = true;
        for (auto a : s) {
            out += (first ? "" : ",") + std::to_string(a.value);
            first = false;
        }
        return out + "}";
    };
    std::ostringstream out;
    out << "theta " << toString(report.theta) << "\n";
    out << "f " << report.faultBound << "\n";
    out << "byz " << agents(report.byz) << "\n";
    if (report.vacuous) out << "no S of size f-|byz| exists\n";
    for (const auto& e : report.entries) {
        out << "S=" << agents(e.excluded) << ": ";
        if (!e.witness) {
            out << "no witness\n";
            continue;
        }
        out << "witness " << toString(*e.witness) << " path";
        for (const auto& n : e.path) out << " " << toString(n);
        out << "\n";
    }
    out << "result: " << (report.satisfied() ? "satisfied" : "violated") << "\n";
    return out.str();
}

}  // namespace byzcone
