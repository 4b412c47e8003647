#pragma once

#include <array>
#include <cstddef>
#include <numeric>
#include <stdexcept>
#include <string>
#include <string_view>
#include <type_traits>
#include <utility>
#include <vector>

namespace overrun {

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation.
struct DomainError : Error {
  using Error::Error;
};

/// Invalid scenario configuration. `field` is the dotted path of the offending
/// entry, e.g. "lever_schedule[3].cp".
struct ConfigError : Error {
  ConfigError(std::string field, const std::string& what)
      : Error(field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// Proportional split requested with a positive total but no positive weights.
struct InconsistencyError : Error {
  using Error::Error;
};

struct SolverError : Error {
  using Error::Error;
};

struct CalibrationError : Error {
  CalibrationError(const std::string& what, std::vector<double> residuals)
      : Error(what), residuals_(std::move(residuals)) {}
  const std::vector<double>& residuals() const noexcept { return residuals_; }

 private:
  std::vector<double> residuals_;
};

// ---------------------------------------------------------------------------
// Enumerations
// ---------------------------------------------------------------------------

enum class Stakeholder : std::size_t {
  ConstructionSubcontractors,
  EquipmentSuppliers,
  DesignAndManagement,  // reactor vendor + architect-engineer + constructor
  Creditors,
};

enum class CostElement : std::size_t { FactoryEquipment, SiteMaterial, SiteLabor };

/// GN-COA accounts carried by the model (1, 2, 3 and 5).
enum class Account : std::size_t { Preconstruction, Direct, Indirect, Supplementary };

enum class CostOverrunType : std::size_t { Rework, LowProductivity, Financing };

enum class ScheduleOverrunType : std::size_t { Rework, LowProductivity, SupplyChainDelay };

template <class E>
inline constexpr std::size_t enum_size = 0;
template <>
inline constexpr std::size_t enum_size<Stakeholder> = 4;
template <>
inline constexpr std::size_t enum_size<CostElement> = 3;
template <>
inline constexpr std::size_t enum_size<Account> = 4;
template <>
inline constexpr std::size_t enum_size<CostOverrunType> = 3;
template <>
inline constexpr std::size_t enum_size<ScheduleOverrunType> = 3;

template <class E>
constexpr std::array<E, enum_size<E>> all_values() {
  std::array<E, enum_size<E>> out{};
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = static_cast<E>(i);
  return out;
}

inline constexpr std::array<Stakeholder, 3> kNonCreditors = {
    Stakeholder::ConstructionSubcontractors, Stakeholder::DesignAndManagement,
    Stakeholder::EquipmentSuppliers};

/// Fixed-size array indexed by an enumeration.
template <class E, class T = double>
struct EnumArray {
  std::array<T, enum_size<E>> values{};

  constexpr T& operator[](E e) { return values[static_cast<std::size_t>(e)]; }
  constexpr const T& operator[](E e) const { return values[static_cast<std::size_t>(e)]; }

  constexpr auto begin() { return values.begin(); }
  constexpr auto end() { return values.end(); }
  constexpr auto begin() const { return values.begin(); }
  constexpr auto end() const { return values.end(); }
  static constexpr std::size_t size() { return enum_size<E>; }

  T sum() const
    requires std::is_arithmetic_v<T>
  {
    return std::accumulate(values.begin(), values.end(), T{});
  }

  friend bool operator==(const EnumArray&, const EnumArray&) = default;
};

template <class Row, class Col>
using EnumMatrix = EnumArray<Row, EnumArray<Col>>;

template <class Row, class Col>
EnumArray<Col> column_sums(const EnumMatrix<Row, Col>& m) {
  EnumArray<Col> out;
  for (auto r : all_values<Row>())
    for (auto c : all_values<Col>()) out[c] += m[r][c];
  return out;
}

using StakeholderValues = EnumArray<Stakeholder>;

namespace detail {

/// Splits `total` in proportion to `weights`. The largest weight absorbs the
/// rounding remainder so the parts add back to `total`.
inline StakeholderValues split_proportionally(double total, const StakeholderValues& weights, const char* what) {
  StakeholderValues out;
  if (total == 0.0) return out;
  const double wsum = weights.sum();
  if (!(wsum > 0.0)) throw InconsistencyError(std::string(what) + ": positive total with zero split weights");
  Stakeholder largest = Stakeholder::ConstructionSubcontractors;
  for (auto s : all_values<Stakeholder>())
    if (weights[s] > weights[largest]) largest = s;
  double assigned = 0.0;
  for (auto s : all_values<Stakeholder>()) {
    if (s == largest) continue;
    out[s] = total * (weights[s] / wsum);
    assigned += out[s];
  }
  out[largest] = total - assigned;
  return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Names (snake_case, used by every serialized format)
// ---------------------------------------------------------------------------

inline constexpr std::array<std::string_view, 4> kStakeholderNames = {
    "construction_subcontractors", "equipment_suppliers", "design_and_management", "creditors"};
inline constexpr std::array<std::string_view, 3> kCostElementNames = {
    "factory_equipment", "site_material", "site_labor"};
inline constexpr std::array<std::string_view, 4> kAccountNames = {
    "preconstruction", "direct", "indirect", "supplementary"};
inline constexpr std::array<std::string_view, 3> kCostOverrunTypeNames = {
    "rework", "low_productivity", "financing"};
inline constexpr std::array<std::string_view, 3> kScheduleOverrunTypeNames = {
    "rework", "low_productivity", "supply_chain_delay"};

template <class E>
constexpr const auto& names_of() {
  if constexpr (std::is_same_v<E, Stakeholder>) return kStakeholderNames;
  else if constexpr (std::is_same_v<E, CostElement>) return kCostElementNames;
  else if constexpr (std::is_same_v<E, Account>) return kAccountNames;
  else if constexpr (std::is_same_v<E, CostOverrunType>) return kCostOverrunTypeNames;
  else return kScheduleOverrunTypeNames;
}

template <class E>
constexpr std::string_view to_string(E e) {
  return names_of<E>()[static_cast<std::size_t>(e)];
}

/// Parses a snake_case enumerator name; throws ConfigError(field) when unknown.
template <class E>
E parse_enum(std::string_view text, const std::string& field) {
  const auto& names = names_of<E>();
  for (std::size_t i = 0; i < names.size(); ++i)
    if (names[i] == text) return static_cast<E>(i);
  throw ConfigError(field, "unknown value '" + std::string(text) + "'");
}

}  // namespace overrun
