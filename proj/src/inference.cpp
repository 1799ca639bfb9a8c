#include "geoflow/inference.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>
#include <sstream>

#include "geoflow/error.hpp"
#include "geoflow/text_io.hpp"

namespace geoflow {

std::vector<std::pair<std::string, double>> HomeEstimate::top(std::size_t k) const {
  std::vector<std::pair<std::string, double>> all(zonal_mass.begin(), zonal_mass.end());
  std::stable_sort(all.begin(), all.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  if (all.size() > k) all.resize(k);
  return all;
}

namespace {

// Indices of cells whose centers fall inside [lo, hi] along one axis.
bool center_range(double lo, double hi, double origin, double cell, std::size_t count,
                  std::size_t& first, std::size_t& last) {
  const double f = std::ceil((lo - origin) / cell - 0.5);
  const double l = std::floor((hi - origin) / cell - 0.5);
  const double max_index = static_cast<double>(count) - 1.0;
  if (l < 0.0 || f > max_index || f > l) return false;
  first = static_cast<std::size_t>(std::max(f, 0.0));
  last = static_cast<std::size_t>(std::min(l, max_index));
  return true;
}

bool same_grid(const GridSpec& a, const GridSpec& b) {
  return a.n_rows == b.n_rows && a.n_cols == b.n_cols && a.cell_size == b.cell_size &&
         a.origin == b.origin;
}

}  // namespace

ZoneIndex::ZoneIndex(const GridSpec& grid, std::span<const ProjectedRegion> regions)
    : grid_(grid), labels_(grid.cells(), -1) {
  std::vector<std::size_t> order(regions.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return regions[a].id() < regions[b].id(); });
  for (std::size_t k = 0; k < order.size(); ++k) {
    const auto& region = regions[order[k]];
    ids_.push_back(region.id());
    // Pad by a hair so centers on the bounding box edge are still tested.
    const double pad = 1e-6;
    std::size_t r0, r1, c0, c1;
    if (!center_range(region.bbox.min_y - pad, region.bbox.max_y + pad, grid.origin.y,
                      grid.cell_size, grid.n_rows, r0, r1) ||
        !center_range(region.bbox.min_x - pad, region.bbox.max_x + pad, grid.origin.x,
                      grid.cell_size, grid.n_cols, c0, c1)) {
      continue;
    }
    for (std::size_t r = r0; r <= r1; ++r) {
      for (std::size_t c = c0; c <= c1; ++c) {
        auto& label = labels_[r * grid.n_cols + c];
        if (label >= 0) continue;
        if (point_in_region(grid.cell_center(r, c), region)) label = static_cast<std::int32_t>(k);
      }
    }
  }
}

std::vector<double> ZoneIndex::zonal_mass(const ActivitySurface& surface) const {
  if (!same_grid(surface.grid, grid_)) {
    fail(ErrorKind::invalid_argument, "surface grid does not match the zone index grid");
  }
  const double cell_area = grid_.cell_size * grid_.cell_size;
  std::vector<double> mass(ids_.size(), 0.0);
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (labels_[i] >= 0) mass[static_cast<std::size_t>(labels_[i])] += surface.values[i];
  }
  for (double& m : mass) m *= cell_area;
  return mass;
}

HomeEstimate infer_home(const ActivitySurface& surface, const ZoneIndex& zones,
                        std::string user_id, std::size_t min_evidence) {
  if (!surface.normalized) fail(ErrorKind::invalid_argument, "infer_home needs a normalized surface");
  HomeEstimate est;
  est.user_id = std::move(user_id);
  est.evidence_count = surface.record_count + surface.skipped_records;
  const auto mass = zones.zonal_mass(surface);
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < mass.size(); ++i) {
    est.zonal_mass[zones.region_ids()[i]] = mass[i];
    // region_ids() is sorted, so strict comparison keeps the smallest id on ties.
    if (mass[i] > 0.0 && (!best || mass[i] > mass[*best])) best = i;
  }
  if (best && est.evidence_count >= min_evidence) est.region_id = zones.region_ids()[*best];
  return est;
}

HomeEstimate infer_home(const ActivitySurface& surface, std::span<const ProjectedRegion> regions,
                        std::string user_id, std::size_t min_evidence) {
  return infer_home(surface, ZoneIndex(surface.grid, regions), std::move(user_id), min_evidence);
}

// ---- profile locations --------------------------------------------------

namespace {

bool is_abbreviation(std::string_view alias) {
  return alias.size() == 2 && std::isalpha(static_cast<unsigned char>(alias[0])) &&
         std::isalpha(static_cast<unsigned char>(alias[1]));
}

}  // namespace

void Gazetteer::add(std::string_view alias, std::string region_id) {
  const auto key = to_lower(trim(alias));
  if (key.empty() || region_id.empty()) return;
  (is_abbreviation(key) ? abbrevs_ : names_)[key] = std::move(region_id);
}

Gazetteer Gazetteer::load_csv(const std::filesystem::path& path) {
  const auto table = read_csv(path);
  const auto alias = table.column("alias");
  const auto region = table.column("region_id");
  Gazetteer g;
  for (const auto& row : table.rows) g.add(row[alias], std::string(trim(row[region])));
  return g;
}

Gazetteer Gazetteer::from_regions(std::span<const Region> regions) {
  Gazetteer g;
  for (const auto& r : regions) g.add(r.name, r.region_id);
  return g;
}

std::optional<std::string> Gazetteer::abbreviation(std::string_view token) const {
  const auto it = abbrevs_.find(to_lower(token));
  if (it == abbrevs_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::string> Gazetteer::name_in(std::string_view text) const {
  const auto lowered = to_lower(text);
  const std::pair<const std::string, std::string>* best = nullptr;
  for (const auto& entry : names_) {
    if (lowered.find(entry.first) == std::string::npos) continue;
    if (!best || entry.first.size() > best->first.size() ||
        (entry.first.size() == best->first.size() && entry.second < best->second)) {
      best = &entry;
    }
  }
  if (!best) return std::nullopt;
  return best->second;
}

std::optional<std::string> match_profile_location(std::string_view profile_text,
                                                  std::span<const Region> regions,
                                                  const Gazetteer& gazetteer) {
  const auto known = [&](const std::optional<std::string>& id) -> std::optional<std::string> {
    if (!id) return std::nullopt;
    if (!regions.empty() && !find_region(regions, *id)) return std::nullopt;
    return id;
  };

  const auto text = trim(profile_text);
  if (text.empty()) return std::nullopt;

  const auto comma = text.rfind(',');
  if (comma != std::string_view::npos) {
    const auto tail = trim(text.substr(comma + 1));
    if (is_abbreviation(tail)) {
      if (auto id = known(gazetteer.abbreviation(tail))) return id;
    }
  }

  if (auto id = known(gazetteer.name_in(text))) return id;

  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && !std::isalnum(static_cast<unsigned char>(text[i]))) ++i;
    std::size_t j = i;
    while (j < text.size() && std::isalnum(static_cast<unsigned char>(text[j]))) ++j;
    const auto token = text.substr(i, j - i);
    if (token.size() == 2 && std::isupper(static_cast<unsigned char>(token[0])) &&
        std::isupper(static_cast<unsigned char>(token[1]))) {
      if (auto id = known(gazetteer.abbreviation(token))) return id;
    }
    i = j;
  }
  return std::nullopt;
}

std::vector<ProfileMatch> match_profiles(
    const std::vector<std::pair<std::string, std::string>>& profiles,
    std::span<const HomeEstimate> estimates, std::span<const Region> regions,
    const Gazetteer& gazetteer) {
  std::map<std::string_view, const HomeEstimate*> by_user;
  for (const auto& e : estimates) by_user[e.user_id] = &e;
  std::vector<ProfileMatch> out;
  out.reserve(profiles.size());
  for (const auto& [user, text] : profiles) {
    ProfileMatch m{user, text, match_profile_location(text, regions, gazetteer), std::nullopt};
    const auto it = by_user.find(user);
    if (m.matched_region_id && it != by_user.end() && it->second->determined()) {
      m.agrees_with_estimate = *m.matched_region_id == *it->second->region_id;
    }
    out.push_back(std::move(m));
  }
  return out;
}

std::optional<double> agreement_rate(std::span<const HomeEstimate> estimates,
                                     std::span<const ProfileMatch> matches) {
  std::map<std::string_view, const HomeEstimate*> by_user;
  for (const auto& e : estimates) by_user[e.user_id] = &e;
  std::size_t comparable = 0;
  std::size_t agree = 0;
  for (const auto& m : matches) {
    const auto it = by_user.find(m.user_id);
    if (!m.matched_region_id || it == by_user.end() || !it->second->determined()) continue;
    ++comparable;
    if (*it->second->region_id == *m.matched_region_id) ++agree;
  }
  if (comparable == 0) return std::nullopt;
  return static_cast<double>(agree) / static_cast<double>(comparable);
}

std::string estimates_to_csv(std::span<const HomeEstimate> estimates) {
  std::ostringstream out;
  CsvWriter csv(out);
  csv.row({"user_id", "region_id", "evidence_count", "top1_region", "top1_mass", "top2_region",
           "top2_mass", "top3_region", "top3_mass"});
  for (const auto& e : estimates) {
    std::vector<std::string> row{e.user_id, e.region_label(), std::to_string(e.evidence_count)};
    const auto top = e.top(3);
    for (std::size_t i = 0; i < 3; ++i) {
      if (i < top.size() && top[i].second > 0.0) {
        row.push_back(top[i].first);
        row.push_back(format_double(top[i].second));
      } else {
        row.emplace_back();
        row.emplace_back();
      }
    }
    csv.row(row);
  }
  return out.str();
}

std::vector<HomeEstimate> estimates_from_csv(const std::filesystem::path& path) {
  const auto table = read_csv(path);
  const auto user = table.column("user_id");
  const auto region = table.column("region_id");
  const auto evidence = table.column("evidence_count");
  std::vector<HomeEstimate> out;
  for (const auto& row : table.rows) {
    HomeEstimate e;
    e.user_id = row[user];
    if (row[region] != kUndetermined && !row[region].empty()) e.region_id = row[region];
    e.evidence_count = static_cast<std::size_t>(std::stoull(row[evidence]));
    for (int k = 1; k <= 3; ++k) {
      const auto rname = "top" + std::to_string(k) + "_region";
      const auto mname = "top" + std::to_string(k) + "_mass";
      const auto& rid = row[table.column(rname)];
      if (!rid.empty()) e.zonal_mass[rid] = std::stod(row[table.column(mname)]);
    }
    out.push_back(std::move(e));
  }
  return out;
}

}  // namespace geoflow
