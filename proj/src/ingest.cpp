#include "lfg/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <random>
#include <string_view>

#include <nlohmann/json.hpp>

#include "lfg/error.hpp"

namespace lfg {

std::int32_t IdMap::intern(ExternalId external) {
  auto [it, inserted] = to_index_.try_emplace(external, static_cast<std::int32_t>(to_external_.size()));
  if (inserted) to_external_.push_back(external);
  return it->second;
}

std::optional<std::int32_t> IdMap::find(ExternalId external) const {
  auto it = to_index_.find(external);
  if (it == to_index_.end()) return std::nullopt;
  return it->second;
}

IdMap IdMap::from_externals(std::vector<ExternalId> externals) {
  IdMap map;
  for (ExternalId e : externals) {
    if (map.find(e)) throw Error("bad_id_map", "duplicate external id " + std::to_string(e));
    map.intern(e);
  }
  return map;
}

void RatingDataset::recount() {
  item_rating_counts.assign(items.size(), 0);
  for (const auto& t : triples) ++item_rating_counts[static_cast<std::size_t>(t.item)];
}

RatingDataset RatingDataset::subset(std::span<const std::size_t> indices) const {
  RatingDataset out;
  out.users = users;
  out.items = items;
  out.scale = scale;
  out.triples.reserve(indices.size());
  for (std::size_t i : indices) out.triples.push_back(triples.at(i));
  out.recount();
  return out;
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

template <typename T>
bool parse_field(std::string_view s, T& out) {
  s = trim(s);
  if (s.empty()) return false;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && ptr == s.data() + s.size();
}

struct CsvRow {
  ExternalId user = 0;
  ExternalId item = 0;
  double rating = 0;
  std::int64_t timestamp = 0;
};

std::optional<CsvRow> parse_movielens_line(std::string_view line) {
  std::string_view fields[4];
  std::size_t n = 0;
  while (n < 4) {
    auto comma = line.find(',');
    fields[n++] = line.substr(0, comma);
    if (comma == std::string_view::npos) {
      line = {};
      break;
    }
    line.remove_prefix(comma + 1);
  }
  // Timestamp is optional; more than four fields is not.
  if (n < 3 || !trim(line).empty()) return std::nullopt;
  CsvRow row;
  if (!parse_field(fields[0], row.user) || !parse_field(fields[1], row.item) ||
      !parse_field(fields[2], row.rating))
    return std::nullopt;
  if (n == 4 && !parse_field(fields[3], row.timestamp)) return std::nullopt;
  if (row.user < 0 || row.item < 0) return std::nullopt;
  return row;
}

struct PairHash {
  std::size_t operator()(std::pair<std::int32_t, std::int32_t> p) const noexcept {
    return std::hash<std::uint64_t>{}((static_cast<std::uint64_t>(static_cast<std::uint32_t>(p.first)) << 32) |
                                      static_cast<std::uint32_t>(p.second));
  }
};

void warn(std::vector<std::string>* warnings, std::string msg) {
  if (warnings) warnings->push_back(std::move(msg));
}

}  // namespace

RatingDataset load_ratings(const std::filesystem::path& path, std::vector<std::string>* warnings,
                           RatingFormat format, RatingScale scale) {
  if (format != RatingFormat::movielens_csv) throw Error("bad_format", "unsupported rating format");
  std::ifstream in(path);
  if (!in) throw Error("io", "cannot open ratings file " + path.string());

  RatingDataset ds;
  ds.scale = scale;
  std::unordered_map<std::pair<std::int32_t, std::int32_t>, std::size_t, PairHash> seen;
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw Error("empty_dataset", "empty dataset: " + path.string());
  ++line_no;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto row = parse_movielens_line(line);
    if (!row) {
      warn(warnings, path.string() + ":" + std::to_string(line_no) + ": malformed line");
      continue;
    }
    if (!scale.contains(row->rating)) {
      warn(warnings, path.string() + ":" + std::to_string(line_no) + ": rating " + std::to_string(row->rating) +
                         " outside scale");
      continue;
    }
    RatingTriple t{ds.users.intern(row->user), ds.items.intern(row->item), row->rating, row->timestamp};
    auto [it, inserted] = seen.try_emplace({t.user, t.item}, ds.triples.size());
    if (inserted)
      ds.triples.push_back(t);
    else
      ds.triples[it->second] = t;
  }
  if (in.bad()) throw Error("io", "read failure on " + path.string());
  if (ds.triples.empty()) throw Error("empty_dataset", "empty dataset: " + path.string());
  ds.recount();
  return ds;
}

std::pair<RatingDataset, RatingDataset> split_dataset(const RatingDataset& ds, double test_fraction,
                                                      std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0))
    throw Error("bad_argument", "test_fraction must lie in (0, 1)");
  if (ds.empty()) throw Error("empty_dataset", "cannot split an empty dataset");

  std::vector<std::vector<std::size_t>> by_user(ds.user_count());
  for (std::size_t i = 0; i < ds.triples.size(); ++i)
    by_user[static_cast<std::size_t>(ds.triples[i].user)].push_back(i);

  std::mt19937_64 rng(seed);
  std::vector<std::size_t> train_idx, test_idx;
  train_idx.reserve(ds.triples.size());
  for (auto& rows : by_user) {
    if (rows.size() < 2) {
      train_idx.insert(train_idx.end(), rows.begin(), rows.end());
      continue;
    }
    std::shuffle(rows.begin(), rows.end(), rng);
    auto n_test = static_cast<std::size_t>(std::llround(test_fraction * static_cast<double>(rows.size())));
    n_test = std::min(n_test, rows.size() - 1);
    test_idx.insert(test_idx.end(), rows.begin(), rows.begin() + static_cast<std::ptrdiff_t>(n_test));
    train_idx.insert(train_idx.end(), rows.begin() + static_cast<std::ptrdiff_t>(n_test), rows.end());
  }
  std::sort(train_idx.begin(), train_idx.end());
  std::sort(test_idx.begin(), test_idx.end());
  return {ds.subset(train_idx), ds.subset(test_idx)};
}

Catalog load_catalog(const std::filesystem::path& path, std::vector<std::string>* warnings) {
  std::ifstream in(path);
  if (!in) throw Error("io", "cannot open catalog file " + path.string());
  Catalog catalog;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const std::string where = path.string() + ":" + std::to_string(line_no);
    nlohmann::json rec;
    try {
      rec = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw Error("bad_catalog", where + ": " + e.what());
    }
    if (!rec.is_object() || !rec.contains("item_id") || !rec["item_id"].is_number_integer())
      throw Error("bad_catalog", where + ": record needs an integer item_id");

    ItemMeta meta;
    meta.item_id = rec["item_id"].get<ExternalId>();
    meta.title = rec.value("title", std::string{});
    if (meta.title.empty()) {
      warn(warnings, where + ": item " + std::to_string(meta.item_id) + " has no title, skipped");
      continue;
    }
    meta.poster_url = rec.value("poster_url", std::string{});
    meta.plot = rec.value("plot", std::string{});
    meta.director = rec.value("director", std::string{});
    if (auto it = rec.find("cast"); it != rec.end() && it->is_array())
      for (const auto& name : *it)
        if (name.is_string()) meta.cast.push_back(name.get<std::string>());

    if (!catalog.items.emplace(meta.item_id, meta).second)
      throw Error("duplicate_item", where + ": duplicate item_id " + std::to_string(meta.item_id));
  }
  return catalog;
}

void attach_rating_counts(Catalog& catalog, const RatingDataset& ds) {
  for (auto& [id, meta] : catalog.items) {
    auto idx = ds.items.find(id);
    meta.rating_count = idx ? ds.item_rating_counts.at(static_cast<std::size_t>(*idx)) : 0;
  }
}

}  // namespace lfg
