#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <sstream>

#include "mqm/error.hpp"
#include "mqm/fixedpoint.hpp"
#include "fixedpoint_detail.hpp"

namespace mqm {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kCacheVersion = 1;
constexpr std::size_t kSnapshotStride = 100;

json certificate_json(const DigitCertificate& c) {
  return json{{"n", c.index},
              {"digit", c.digit},
              {"cap", c.cap},
              {"candidates", c.candidates},
              {"certified", c.certified},
              {"hash", c.hash()}};
}

json certificate_json_full(const DigitCertificate& c) {
  json j = certificate_json(c);
  j["lo"] = c.lo.to_string();
  j["hi"] = c.hi.to_string();
  j["sign_lo"] = c.sign_lo;
  j["sign_hi"] = c.sign_hi;
  return j;
}

struct StoredEntry {
  std::size_t n = 0;
  std::uint64_t digit = 0;
  std::uint64_t cap = 0;
  std::vector<std::uint64_t> candidates;
  std::vector<std::uint64_t> certified;
  std::string hash;
};

StoredEntry entry_of(const json& j) {
  StoredEntry e;
  e.n = j.at("n").get<std::size_t>();
  e.digit = j.at("digit").get<std::uint64_t>();
  e.cap = j.at("cap").get<std::uint64_t>();
  e.candidates = j.at("candidates").get<std::vector<std::uint64_t>>();
  e.certified = j.at("certified").get<std::vector<std::uint64_t>>();
  e.hash = j.at("hash").get<std::string>();
  return e;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw CacheError("cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

DigitCache::DigitCache(fs::path path, Target target) : path_(std::move(path)), target_(target) {}

fs::path DigitCache::journal_path() const {
  fs::path j = path_;
  j += ".journal";
  return j;
}

FixedPointRecord DigitCache::load() const {
  FixedPointRecord record;
  record.target = target_;
  const bool have_snapshot = fs::exists(path_);
  const bool have_journal = fs::exists(journal_path());
  if (!have_snapshot && !have_journal) return record;

  std::vector<StoredEntry> entries;
  json snapshots = json::array();
  if (have_snapshot) {
    try {
      json doc = json::parse(read_file(path_));
      if (doc.at("version").get<int>() != kCacheVersion) {
        throw CacheError(path_.string() + ": unsupported cache version");
      }
      if (doc.at("target").get<std::string>() != to_string(target_)) {
        throw CacheError(path_.string() + ": cache holds target '" + doc.at("target").get<std::string>() +
                         "', not '" + to_string(target_) + "'");
      }
      auto digits = doc.at("digits").get<std::vector<std::uint64_t>>();
      for (const auto& c : doc.at("certificates")) entries.push_back(entry_of(c));
      if (digits.size() != entries.size()) throw CacheError(path_.string() + ": digit and certificate counts differ");
      for (std::size_t i = 0; i < digits.size(); ++i) {
        if (digits[i] != entries[i].digit) throw CacheError(path_.string() + ": digit list disagrees with certificates");
      }
      snapshots = doc.at("snapshots");
    } catch (const json::exception& e) {
      throw CacheError(path_.string() + ": malformed cache: " + e.what());
    }
  }

  if (have_journal) {
    const std::string text = read_file(journal_path());
    std::size_t pos = 0;
    std::size_t line_no = 0;
    while (pos < text.size()) {
      std::size_t nl = text.find('\n', pos);
      const bool terminated = nl != std::string::npos;
      std::string line = text.substr(pos, terminated ? nl - pos : std::string::npos);
      pos = terminated ? nl + 1 : text.size();
      ++line_no;
      if (line.empty()) continue;
      StoredEntry e;
      try {
        json j = json::parse(line);
        if (j.contains("target") && j.at("target").get<std::string>() != to_string(target_)) {
          throw CacheError(journal_path().string() + ": journal belongs to another target");
        }
        e = entry_of(j);
      } catch (const json::exception&) {
        // A torn final write leaves an unterminated last line; drop it.
        if (!terminated) break;
        throw CacheError(journal_path().string() + ": malformed line " + std::to_string(line_no));
      }
      if (e.n <= entries.size()) {
        // Already covered by the snapshot (crash between snapshot and journal reset).
        if (entries[e.n - 1].hash != e.hash) {
          throw CacheError(journal_path().string() + ": entry " + std::to_string(e.n) + " contradicts the snapshot");
        }
        continue;
      }
      entries.push_back(std::move(e));
    }
  }

  PrefixState state;
  for (const auto& e : entries) {
    const std::string where = path_.string() + ": digit " + std::to_string(e.n);
    if (e.n != state.n) throw CacheError(where + " out of sequence");
    if (std::find(e.certified.begin(), e.certified.end(), e.digit) == e.certified.end() ||
        !std::includes(e.candidates.begin(), e.candidates.end(), e.certified.begin(), e.certified.end())) {
      throw CacheError(where + " is not among its certified candidates");
    }
    DigitCertificate cert;
    cert.cap = e.cap;
    cert.candidates = e.candidates;
    cert.certified = e.certified;
    detail::fill_interval(state, e.digit, cert);
    if (!cert.signs_valid()) throw CacheError(where + ": endpoint signs do not certify a fixed point");
    if (cert.hash() != e.hash) throw CacheError(where + ": certificate hash mismatch");
    state.push(e.digit);
    record.push_digit(e.digit);
    if (!record.ambiguous_from && cert.certified.size() > 1) record.ambiguous_from = cert.index;
    record.certificates.push_back(std::move(cert));
  }

  try {
    for (const auto& s : snapshots) {
      const auto n = s.at("n").get<std::size_t>();
      if (n < 1 || n > record.size()) throw CacheError(path_.string() + ": snapshot index out of range");
      const auto& c = record.convergents[n - 1];
      if (parse_integer(s.at("p").get<std::string>()) != c.p || parse_integer(s.at("q").get<std::string>()) != c.q ||
          s.at("S").get<std::uint64_t>() != record.sums[n - 1]) {
        throw CacheError(path_.string() + ": snapshot at n = " + std::to_string(n) + " disagrees with the digits");
      }
    }
  } catch (const json::exception& e) {
    throw CacheError(path_.string() + ": malformed snapshot list: " + e.what());
  } catch (const ParseError& e) {
    throw CacheError(path_.string() + ": malformed snapshot list: " + e.what());
  }
  return record;
}

void DigitCache::append(const FixedPointRecord& record) {
  if (record.certificates.empty()) return;
  if (path_.has_parent_path()) fs::create_directories(path_.parent_path());
  std::ofstream out(journal_path(), std::ios::app | std::ios::binary);
  if (!out) throw CacheError("cannot write " + journal_path().string());
  json j = certificate_json(record.certificates.back());
  j["target"] = to_string(target_);
  out << j.dump() << '\n';
  out.flush();
  if (!out) throw CacheError("write failed on " + journal_path().string());
}

void DigitCache::snapshot(const FixedPointRecord& record) {
  if (record.certificates.size() != record.size()) throw CacheError("only certified records can be cached");
  if (path_.has_parent_path()) fs::create_directories(path_.parent_path());
  json doc;
  doc["version"] = kCacheVersion;
  doc["target"] = to_string(target_);
  doc["digits"] = record.digits;
  json snaps = json::array();
  for (std::size_t n = 1; n <= record.size(); ++n) {
    if (n % kSnapshotStride != 0 && n != record.size()) continue;
    const auto& c = record.convergents[n - 1];
    snaps.push_back(json{{"n", n}, {"p", to_string(c.p)}, {"q", to_string(c.q)}, {"S", record.sums[n - 1]}});
  }
  doc["snapshots"] = std::move(snaps);
  json certs = json::array();
  for (const auto& c : record.certificates) certs.push_back(certificate_json(c));
  doc["certificates"] = std::move(certs);

  fs::path tmp = path_;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc | std::ios::binary);
    if (!out) throw CacheError("cannot write " + tmp.string());
    out << doc.dump() << '\n';
    out.flush();
    if (!out) throw CacheError("write failed on " + tmp.string());
  }
  fs::rename(tmp, path_);
  std::error_code ec;
  fs::remove(journal_path(), ec);
}

std::string record_to_json(const FixedPointRecord& record, bool with_certificates) {
  json j;
  j["target"] = to_string(record.target);
  j["n"] = record.size();
  j["digits"] = record.digits;
  j["ambiguous_from"] = record.ambiguous_from ? json(*record.ambiguous_from) : json(nullptr);
  if (!record.empty()) {
    const auto& c = record.convergents.back();
    j["convergent"] = {{"p", to_string(c.p)}, {"q", to_string(c.q)}};
    j["S"] = record.sums.back();
    auto [lo, hi] = enclosure(record);
    j["enclosure"] = {{"lo", lo.to_string()}, {"hi", hi.to_string()}};
  }
  if (with_certificates) {
    json certs = json::array();
    for (const auto& c : record.certificates) certs.push_back(certificate_json_full(c));
    j["certificates"] = std::move(certs);
  }
  return j.dump(2);
}

}  // namespace mqm
