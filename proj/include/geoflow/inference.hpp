#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "geoflow/geomodel.hpp"
#include "geoflow/vbkde.hpp"

namespace geoflow {

inline constexpr std::size_t kDefaultMinEvidence = 5;
inline constexpr std::string_view kUndetermined = "undetermined";

struct HomeEstimate {
  std::string user_id;
  std::optional<std::string> region_id;  // empty when undetermined
  std::map<std::string, double> zonal_mass;
  std::size_t evidence_count = 0;

  bool determined() const { return region_id.has_value(); }
  std::string region_label() const { return region_id.value_or(std::string(kUndetermined)); }
  /// Regions with the largest masses, ties by region_id.
  std::vector<std::pair<std::string, double>> top(std::size_t k) const;
};

/// Assigns every cell of a grid to at most one region by its center. Regions
/// are visited in region_id order and the first containing region wins, so
/// cells on shared borders are assigned deterministically.
class ZoneIndex {
 public:
  ZoneIndex(const GridSpec& grid, std::span<const ProjectedRegion> regions);

  const GridSpec& grid() const { return grid_; }
  const std::vector<std::string>& region_ids() const { return ids_; }
  std::int32_t label(std::size_t cell) const { return labels_[cell]; }

  /// Probability mass per region (same order as region_ids()).
  std::vector<double> zonal_mass(const ActivitySurface& surface) const;

 private:
  GridSpec grid_;
  std::vector<std::string> ids_;
  std::vector<std::int32_t> labels_;  // -1 outside every region
};

/// Home region = zone with the largest mass of a normalized surface.
/// Undetermined when evidence is below min_evidence or no zone has mass.
HomeEstimate infer_home(const ActivitySurface& surface, const ZoneIndex& zones,
                        std::string user_id, std::size_t min_evidence = kDefaultMinEvidence);
HomeEstimate infer_home(const ActivitySurface& surface, std::span<const ProjectedRegion> regions,
                        std::string user_id, std::size_t min_evidence = kDefaultMinEvidence);

/// Alias table for profile locations. Two-letter aliases are treated as
/// abbreviations, everything else as a full name. Lookups are case-insensitive.
class Gazetteer {
 public:
  void add(std::string_view alias, std::string region_id);
  static Gazetteer load_csv(const std::filesystem::path& path);
  static Gazetteer from_regions(std::span<const Region> regions);

  std::optional<std::string> abbreviation(std::string_view token) const;
  /// Longest full-name alias contained in the text.
  std::optional<std::string> name_in(std::string_view text) const;

  std::size_t size() const { return abbrevs_.size() + names_.size(); }

 private:
  std::map<std::string, std::string> abbrevs_;
  std::map<std::string, std::string> names_;
};

/// Priority: trailing ", XX" abbreviation, then a full region name anywhere in
/// the text, then a standalone upper-case two-letter token.
std::optional<std::string> match_profile_location(std::string_view profile_text,
                                                  std::span<const Region> regions,
                                                  const Gazetteer& gazetteer);

struct ProfileMatch {
  std::string user_id;
  std::string profile_text;
  std::optional<std::string> matched_region_id;
  std::optional<bool> agrees_with_estimate;
};

std::vector<ProfileMatch> match_profiles(
    const std::vector<std::pair<std::string, std::string>>& profiles,
    std::span<const HomeEstimate> estimates, std::span<const Region> regions,
    const Gazetteer& gazetteer);

/// Share of comparable users (determined estimate and matched profile) whose
/// regions agree; nullopt when no user is comparable.
std::optional<double> agreement_rate(std::span<const HomeEstimate> estimates,
                                     std::span<const ProfileMatch> matches);

/// CSV with user_id, region_id, evidence_count, then top-3 regions and masses.
std::string estimates_to_csv(std::span<const HomeEstimate> estimates);
std::vector<HomeEstimate> estimates_from_csv(const std::filesystem::path& path);

}  // namespace geoflow
