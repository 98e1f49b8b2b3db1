#include "mqm/scan.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <fstream>
#include <mutex>
#include <queue>
#include <sstream>
#include <thread>

#include "mqm/error.hpp"
#include "mqm/qmark.hpp"

namespace mqm {

namespace fs = std::filesystem;
using nlohmann::json;

const char* to_string(FractionStatus s) {
  switch (s) {
    case FractionStatus::satisfies:
      return "satisfies";
    case FractionStatus::counterexample:
      return "counterexample";
    case FractionStatus::equality:
      return "equality";
  }
  return "?";
}

FractionVerdict verdict_from_image(const Integer& p, const Integer& q, const Dyadic& image) {
  FractionVerdict v;
  v.p = p;
  v.q = q;
  const std::uint64_t e = image.exp();
  Integer shifted;
  mpz_mul_2exp(shifted.get_mpz_t(), p.get_mpz_t(), e);
  Integer t = q * image.num() - shifted;  // q N - 2^e p
  v.status = t == 0 ? FractionStatus::equality : FractionStatus::satisfies;
  v.lhs = 2 * q * abs(t);
  mpz_ui_pow_ui(v.rhs.get_mpz_t(), 2, e);
  if (v.status != FractionStatus::equality && v.lhs <= v.rhs) v.status = FractionStatus::counterexample;
  return v;
}

FractionVerdict check_fraction(const Integer& p, const Integer& q) {
  if (q <= 0 || p < 0) throw DomainError("check_fraction needs 0 <= p and q > 0");
  Integer g;
  mpz_gcd(g.get_mpz_t(), p.get_mpz_t(), q.get_mpz_t());
  if (g != 1) throw DomainError(to_string(p) + "/" + to_string(q) + " is not reduced");
  if (2 * p > q) throw DomainError(to_string(p) + "/" + to_string(q) + " lies outside [0, 1/2]");
  return verdict_from_image(p, q, qmark_of_rational(Rational(p, q)));
}

namespace {

bool by_q_then_p(const FractionVerdict& a, const FractionVerdict& b) {
  if (a.q != b.q) return a.q < b.q;
  if (a.p != b.p) return a.p < b.p;
  return a.index < b.index;
}

// Hot-path classification with reusable scratch storage; only fractions that
// are not plainly satisfied get a full verdict.
class Classifier {
 public:
  Classifier() {
    mpz_init(t_);
    mpz_init(u_);
  }
  ~Classifier() {
    mpz_clear(t_);
    mpz_clear(u_);
  }
  Classifier(const Classifier&) = delete;
  Classifier& operator=(const Classifier&) = delete;

  FractionStatus operator()(std::uint64_t p, std::uint64_t q, const Dyadic& image) {
    const std::uint64_t e = image.exp();
    mpz_mul_ui(t_, image.num().get_mpz_t(), q);
    mpz_set_ui(u_, p);
    mpz_mul_2exp(u_, u_, e);
    mpz_sub(t_, t_, u_);
    if (mpz_sgn(t_) == 0) return FractionStatus::equality;
    mpz_abs(t_, t_);
    mpz_mul_ui(t_, t_, 2 * q);
    // lhs > 2^e unless lhs has at most e + 1 bits and is exactly 2^e or below.
    const std::size_t bits = mpz_sizeinbase(t_, 2);
    if (bits > e + 1) return FractionStatus::satisfies;
    if (bits < e + 1) return FractionStatus::counterexample;
    return mpz_scan1(t_, 0) == e ? FractionStatus::counterexample : FractionStatus::satisfies;
  }

 private:
  mpz_t t_;
  mpz_t u_;
};

struct Node {
  std::uint64_t lp, lq, rp, rq;
  Dyadic limg, rimg;

  std::uint64_t mq() const { return lq + rq; }
  std::uint64_t mp() const { return lp + rp; }
};

struct TaskResult {
  std::uint64_t checked = 0;
  std::vector<std::pair<std::uint64_t, std::uint64_t>> counterexamples;  // (p, q)
  std::vector<std::pair<std::uint64_t, std::uint64_t>> equalities;
  bool done = false;
};

void record_status(TaskResult& out, FractionStatus s, std::uint64_t p, std::uint64_t q) {
  ++out.checked;
  if (s == FractionStatus::counterexample) out.counterexamples.emplace_back(p, q);
  if (s == FractionStatus::equality) out.equalities.emplace_back(p, q);
}

TaskResult explore(const Node& root, std::uint64_t q_max) {
  TaskResult out;
  Classifier classify;
  std::vector<Node> stack;
  stack.push_back(root);
  while (!stack.empty()) {
    Node node = std::move(stack.back());
    stack.pop_back();
    if (node.mq() > q_max) continue;
    const std::uint64_t mp = node.mp(), mq = node.mq();
    Dyadic mimg = Dyadic::midpoint(node.limg, node.rimg);
    record_status(out, classify(mp, mq, mimg), mp, mq);
    if (mq + node.rq <= q_max) stack.push_back(Node{mp, mq, node.rp, node.rq, mimg, node.rimg});
    if (node.lq + mq <= q_max) stack.push_back(Node{node.lp, node.lq, mp, mq, node.limg, std::move(mimg)});
  }
  return out;
}

struct Partition {
  TaskResult prelude;  // fractions classified while splitting the tree
  std::vector<Node> tasks;
};

Partition partition(std::uint64_t q_max, std::size_t target_tasks) {
  Partition part;
  Classifier classify;
  // The boundary fractions 0/1 and 1/2.
  record_status(part.prelude, classify(0, 1, Dyadic(0, 0)), 0, 1);
  record_status(part.prelude, classify(1, 2, Dyadic(1, 1)), 1, 2);

  auto later = [](const Node& a, const Node& b) {
    if (a.mq() != b.mq()) return a.mq() > b.mq();
    return a.mp() > b.mp();
  };
  std::priority_queue<Node, std::vector<Node>, decltype(later)> frontier(later);
  Node root{0, 1, 1, 2, Dyadic(0, 0), Dyadic(1, 1)};
  if (root.mq() <= q_max) frontier.push(root);
  while (!frontier.empty() && frontier.size() < target_tasks) {
    Node node = frontier.top();
    frontier.pop();
    const std::uint64_t mp = node.mp(), mq = node.mq();
    Dyadic mimg = Dyadic::midpoint(node.limg, node.rimg);
    record_status(part.prelude, classify(mp, mq, mimg), mp, mq);
    Node left{node.lp, node.lq, mp, mq, node.limg, mimg};
    Node right{mp, mq, node.rp, node.rq, std::move(mimg), node.rimg};
    if (left.mq() <= q_max) frontier.push(std::move(left));
    if (right.mq() <= q_max) frontier.push(std::move(right));
  }
  while (!frontier.empty()) {
    part.tasks.push_back(frontier.top());
    frontier.pop();
  }
  return part;
}

json pairs_json(const std::vector<std::pair<std::uint64_t, std::uint64_t>>& v) {
  json out = json::array();
  for (auto [p, q] : v) out.push_back(json::array({p, q}));
  return out;
}

std::vector<std::pair<std::uint64_t, std::uint64_t>> pairs_of(const json& j) {
  std::vector<std::pair<std::uint64_t, std::uint64_t>> out;
  for (const auto& e : j) out.emplace_back(e.at(0).get<std::uint64_t>(), e.at(1).get<std::uint64_t>());
  return out;
}

class Checkpoint {
 public:
  Checkpoint(fs::path path, std::uint64_t q_max, std::size_t tasks) : path_(std::move(path)), q_max_(q_max), tasks_(tasks) {}

  // Returns restored results, revalidated against the task roots.
  std::vector<TaskResult> restore(const std::vector<Node>& roots) const {
    std::vector<TaskResult> out(roots.size());
    std::ifstream in(path_);
    if (!in) return out;
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    std::size_t pos = 0;
    bool header = true;
    while (pos < text.size()) {
      std::size_t nl = text.find('\n', pos);
      const bool terminated = nl != std::string::npos;
      std::string line = text.substr(pos, terminated ? nl - pos : std::string::npos);
      pos = terminated ? nl + 1 : text.size();
      if (line.empty()) continue;
      json j;
      try {
        j = json::parse(line);
      } catch (const json::exception&) {
        if (!terminated) break;  // torn final write
        throw CacheError(path_.string() + ": malformed checkpoint line");
      }
      try {
        if (header) {
          header = false;
          if (j.at("version").get<int>() != 1 || j.at("kind").get<std::string>() != "scan" ||
              j.at("qmax").get<std::uint64_t>() != q_max_ || j.at("tasks").get<std::size_t>() != tasks_) {
            throw CacheError(path_.string() + ": checkpoint was written for a different scan");
          }
          continue;
        }
        const auto i = j.at("task").get<std::size_t>();
        if (i >= roots.size()) throw CacheError(path_.string() + ": task index out of range");
        const Node& root = roots[i];
        const auto& r = j.at("root");
        if (r.at("p").get<std::uint64_t>() != root.mp() || r.at("q").get<std::uint64_t>() != root.mq()) {
          throw CacheError(path_.string() + ": task " + std::to_string(i) + " has a different subtree root");
        }
        FractionVerdict fresh = check_fraction(Integer(static_cast<unsigned long>(root.mp())),
                                               Integer(static_cast<unsigned long>(root.mq())));
        if (r.at("status").get<std::string>() != to_string(fresh.status)) {
          throw CacheError(path_.string() + ": task " + std::to_string(i) + " root verdict does not revalidate");
        }
        TaskResult t;
        t.checked = j.at("checked").get<std::uint64_t>();
        t.counterexamples = pairs_of(j.at("counterexamples"));
        t.equalities = pairs_of(j.at("equalities"));
        t.done = true;
        out[i] = std::move(t);
      } catch (const json::exception& e) {
        throw CacheError(path_.string() + ": malformed checkpoint entry: " + e.what());
      }
    }
    return out;
  }

  void start(bool keep) {
    if (path_.has_parent_path()) fs::create_directories(path_.parent_path());
    if (keep && fs::exists(path_) && fs::file_size(path_) > 0) {
      out_.open(path_, std::ios::app);
      // A torn last line would glue onto the next entry; start a fresh line.
      out_ << '\n';
    } else {
      out_.open(path_, std::ios::trunc);
      out_ << json{{"version", 1}, {"kind", "scan"}, {"qmax", q_max_}, {"tasks", tasks_}}.dump() << '\n';
    }
    out_.flush();
    if (!out_) throw CacheError("cannot write " + path_.string());
  }

  void write(std::size_t i, const Node& root, FractionStatus root_status, const TaskResult& t) {
    json j{{"task", i},
           {"root", {{"p", root.mp()}, {"q", root.mq()}, {"status", to_string(root_status)}}},
           {"checked", t.checked},
           {"counterexamples", pairs_json(t.counterexamples)},
           {"equalities", pairs_json(t.equalities)}};
    std::lock_guard lock(mu_);
    out_ << j.dump() << '\n';
    out_.flush();
  }

 private:
  fs::path path_;
  std::uint64_t q_max_;
  std::size_t tasks_;
  std::ofstream out_;
  std::mutex mu_;
};

FractionVerdict full_verdict(std::uint64_t p, std::uint64_t q) {
  return check_fraction(Integer(static_cast<unsigned long>(p)), Integer(static_cast<unsigned long>(q)));
}

json verdict_json(const FractionVerdict& v, bool with_index) {
  json j{{"p", to_string(v.p)}, {"q", to_string(v.q)}, {"lhs", to_string(v.lhs)}, {"rhs", to_string(v.rhs)}};
  if (with_index) j["index"] = v.index;
  return j;
}

}  // namespace

ScanReport scan_inequality(std::uint64_t q_max, const ScanOptions& options) {
  if (q_max < 2) throw DomainError("scan needs q_max >= 2");
  Partition part = partition(q_max, std::max<std::size_t>(1, options.target_tasks));
  const std::size_t n_tasks = part.tasks.size();

  std::vector<TaskResult> results(n_tasks);
  std::optional<Checkpoint> checkpoint;
  std::size_t restored = 0;
  if (options.checkpoint) {
    checkpoint.emplace(*options.checkpoint, q_max, n_tasks);
    if (options.resume) {
      results = checkpoint->restore(part.tasks);
      restored = static_cast<std::size_t>(std::count_if(results.begin(), results.end(), [](const TaskResult& t) { return t.done; }));
    }
    checkpoint->start(options.resume);
  }

  std::vector<std::size_t> pending;
  for (std::size_t i = 0; i < n_tasks; ++i) {
    if (!results[i].done) pending.push_back(i);
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(pending.size());
  auto worker = [&] {
    for (std::size_t k = next++; k < pending.size(); k = next++) {
      const std::size_t i = pending[k];
      try {
        TaskResult t = explore(part.tasks[i], q_max);
        t.done = true;
        if (checkpoint) {
          Classifier classify;
          const Node& root = part.tasks[i];
          checkpoint->write(i, root, classify(root.mp(), root.mq(), Dyadic::midpoint(root.limg, root.rimg)), t);
        }
        results[i] = std::move(t);
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };
  const unsigned n_threads = std::max(1u, std::min<unsigned>(options.workers, static_cast<unsigned>(std::max<std::size_t>(1, pending.size()))));
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  ScanReport report;
  report.q_max = q_max;
  report.tasks = n_tasks;
  report.tasks_restored = restored;
  auto absorb = [&report](const TaskResult& t) {
    report.fractions_checked += t.checked;
    for (auto [p, q] : t.counterexamples) {
      FractionVerdict v = full_verdict(p, q);
      if (v.status != FractionStatus::counterexample) {
        throw CacheError(std::to_string(p) + "/" + std::to_string(q) + " was recorded as a counterexample but is not one");
      }
      report.counterexamples.push_back(std::move(v));
    }
    for (auto [p, q] : t.equalities) {
      FractionVerdict v = full_verdict(p, q);
      if (v.status != FractionStatus::equality) {
        throw CacheError(std::to_string(p) + "/" + std::to_string(q) + " was recorded as an equality but is not one");
      }
      report.equalities.push_back(std::move(v));
    }
  };
  absorb(part.prelude);
  for (const auto& t : results) absorb(t);
  std::sort(report.counterexamples.begin(), report.counterexamples.end(), by_q_then_p);
  std::sort(report.equalities.begin(), report.equalities.end(), by_q_then_p);
  return report;
}

ScanReport scan_convergents(const FixedPointRecord& record) {
  if (record.empty()) throw DomainError("scan_convergents needs a non-empty record");
  ScanReport report;
  report.region = "convergents";
  for (const auto& c : record.convergents) {
    FractionVerdict v = check_fraction(c.p, c.q);
    v.index = c.index;
    ++report.fractions_checked;
    if (v.status == FractionStatus::counterexample) report.counterexamples.push_back(std::move(v));
    if (v.status == FractionStatus::equality) report.equalities.push_back(std::move(v));
  }
  return report;
}

std::string ScanReport::to_json() const {
  const bool convergents = region == "convergents";
  json j;
  if (!convergents) j["qmax"] = q_max;
  j["region"] = region;
  j["checked"] = fractions_checked;
  j["counterexamples"] = json::array();
  for (const auto& v : counterexamples) j["counterexamples"].push_back(verdict_json(v, convergents));
  j["equalities"] = json::array();
  for (const auto& v : equalities) j["equalities"].push_back(verdict_json(v, convergents));
  return j.dump();
}

std::string ScanReport::to_csv() const {
  std::ostringstream out;
  out << "status,index,p,q,lhs,rhs\n";
  for (const auto* list : {&counterexamples, &equalities}) {
    for (const auto& v : *list) {
      out << to_string(v.status) << ',' << v.index << ',' << to_string(v.p) << ',' << to_string(v.q) << ','
          << to_string(v.lhs) << ',' << to_string(v.rhs) << '\n';
    }
  }
  return out.str();
}

}  // namespace mqm
