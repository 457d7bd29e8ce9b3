#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace lfg {

using ExternalId = std::int64_t;

/// Bijection between the ids found in a data file and contiguous indices 0..n-1.
class IdMap {
 public:
  /// Returns the index for `external`, assigning the next free one if unseen.
  std::int32_t intern(ExternalId external);
  std::optional<std::int32_t> find(ExternalId external) const;
  ExternalId external(std::int32_t index) const { return to_external_.at(static_cast<std::size_t>(index)); }
  std::size_t size() const noexcept { return to_external_.size(); }
  const std::vector<ExternalId>& externals() const noexcept { return to_external_; }

  static IdMap from_externals(std::vector<ExternalId> externals);

  friend bool operator==(const IdMap& a, const IdMap& b) { return a.to_external_ == b.to_external_; }

 private:
  std::vector<ExternalId> to_external_;
  std::unordered_map<ExternalId, std::int32_t> to_index_;
};

struct RatingTriple {
  std::int32_t user = 0;  // compacted index
  std::int32_t item = 0;  // compacted index
  double rating = 0.0;
  std::int64_t timestamp = 0;
};

struct RatingScale {
  double min = 0.5;
  double max = 5.0;
  bool contains(double r) const noexcept { return r >= min && r <= max; }
};

struct RatingDataset {
  std::vector<RatingTriple> triples;
  IdMap users;
  IdMap items;
  RatingScale scale;
  /// Number of triples per compacted item index.
  std::vector<std::int64_t> item_rating_counts;

  std::size_t user_count() const noexcept { return users.size(); }
  std::size_t item_count() const noexcept { return items.size(); }
  bool empty() const noexcept { return triples.empty(); }

  /// Same id universe, only the triples at `indices`; counts recomputed.
  RatingDataset subset(std::span<const std::size_t> indices) const;
  void recount();
};

enum class RatingFormat { movielens_csv };

/// Parses `userId,itemId,rating,timestamp` lines after a single header line.
/// Malformed lines and out-of-scale ratings are skipped; a message naming the
/// line number is appended to `warnings` when given. Later duplicates of a
/// (user, item) pair replace earlier ones.
RatingDataset load_ratings(const std::filesystem::path& path,
                           std::vector<std::string>* warnings = nullptr,
                           RatingFormat format = RatingFormat::movielens_csv,
                           RatingScale scale = {});

/// Split into (train, test) with each user's ratings partitioned separately.
/// Users with a single rating keep it in train.
std::pair<RatingDataset, RatingDataset> split_dataset(const RatingDataset& ds, double test_fraction,
                                                      std::uint64_t seed);

struct ItemMeta {
  ExternalId item_id = 0;
  std::string title;
  std::string poster_url;
  std::string plot;
  std::vector<std::string> cast;
  std::string director;
  std::int64_t rating_count = 0;
};

struct Catalog {
  std::map<ExternalId, ItemMeta> items;

  const ItemMeta* find(ExternalId id) const {
    auto it = items.find(id);
    return it == items.end() ? nullptr : &it->second;
  }
  bool contains(ExternalId id) const { return items.contains(id); }
};

/// Reads one JSON object per line with keys item_id, title, poster_url, plot,
/// cast (array of strings) and director. Records without a title are skipped
/// with a warning; a repeated item_id is an error.
Catalog load_catalog(const std::filesystem::path& path, std::vector<std::string>* warnings = nullptr);

/// Fills ItemMeta::rating_count from the dataset's triples.
void attach_rating_counts(Catalog& catalog, const RatingDataset& ds);

}  // namespace lfg
