#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace techdebt {

enum class AhaGroup : std::uint8_t {
  Causes,
  Incurrence,
  Consequences,
  ViciousCycle,
  Repayment,
  Architecture,
  TdManagement,
  Business,
};

constexpr std::string_view to_string(AhaGroup g) {
  switch (g) {
    case AhaGroup::Causes: return "Causes";
    case AhaGroup::Incurrence: return "Incurrence";
    case AhaGroup::Consequences: return "Consequences";
    case AhaGroup::ViciousCycle: return "ViciousCycle";
    case AhaGroup::Repayment: return "Repayment";
    case AhaGroup::Architecture: return "Architecture";
    case AhaGroup::TdManagement: return "TdManagement";
    case AhaGroup::Business: return "Business";
  }
  return "?";
}

struct AhaRow {
  AhaGroup group;
  std::string_view variable;
  std::string_view description;
};

// The learning-objective table: every (group, variable) pair a card or game
// mechanic may be tagged with. Variables and descriptions are verbatim.
inline constexpr std::array<AhaRow, 32> kAhaRegistry{{
    {AhaGroup::Causes, "Time", "Time pressure can be a cause of TD (deadlines)."},
    {AhaGroup::Causes, "Budget", "Cost pressure can be a cause for TD (license costs)."},
    {AhaGroup::Causes, "Business", "Business decisions can be a cause of TD (change in requirements, change in strategy)."},
    {AhaGroup::Causes, "Management", "Management decisions can be a cause of TD (broken communication, poorly planned projects)."},
    {AhaGroup::Causes, "Personnel", "Personnel can be a cause of TD (lack of personnel, inexperienced or unmotivated personnel, frequent changes)."},
    {AhaGroup::Causes, "Technology", "chosen technology can be a cause of TD (outdated technology)."},
    {AhaGroup::Causes, "Decisions", "Incorrect decisions can be a cause of TD (architectural decisions)."},
    {AhaGroup::Causes, "Awareness", "Lack of awareness of TD can be a cause of TD."},
    {AhaGroup::Causes, "Chains", "Causes of TD can trigger other causes of TD."},
    {AhaGroup::Incurrence, "Conscious", "TD can be incurred consciously."},
    {AhaGroup::Incurrence, "Unconscious", "TD can be incurred unconsciously."},
    {AhaGroup::Consequences, "Time", "TD can lead to more time expenditure (overtime, missed deadlines, longer development process)."},
    {AhaGroup::Consequences, "Budget", "TD can lead to higher costs (optimization costs, project becomes more expensive)."},
    {AhaGroup::Consequences, "Business", "TD can negatively affect the business (unmet requirements, loss of customers, legal consequences)."},
    {AhaGroup::Consequences, "Management", "TD can negatively affect management (lack of controllability, future risk)."},
    {AhaGroup::Consequences, "Personnel", "TD can lead to personnel problems (terminations, stress, new developers having to be trained)."},
    {AhaGroup::Consequences, "Technology", "TD can lead to technology problems (maintainability, bugs, dead-end)."},
    {AhaGroup::Consequences, "Chains", "Consequences of TD can trigger further consequences of TD."},
    {AhaGroup::ViciousCycle, "Inner", "TD can lead to further TD (broken window phenomenon)."},
    {AhaGroup::ViciousCycle, "Outer", "Consequences of TD can become causes for new TD."},
    {AhaGroup::Repayment, "Difficult", "Paying back TD is difficult."},
    {AhaGroup::Repayment, "Time-consuming", "Repaying TD is time-consuming."},
    {AhaGroup::Repayment, "Benefits", "The repayment of TD can create advantages for further development."},
    {AhaGroup::Repayment, "Simplified", "Certain measures make it easier to repay TD (refactoring, engaging specialists, communication)."},
    {AhaGroup::Architecture, "Critical", "TD items in architecture are the most critical debts."},
    {AhaGroup::Architecture, "Hard to repay", "TD items in architecture are the hardest to repay."},
    {AhaGroup::Architecture, "Prevents TD", "Architecture can help deal with TD."},
    {AhaGroup::TdManagement, "Identifying TD", "To fix TD, they must first be detected."},
    {AhaGroup::TdManagement, "Prioritizing TD", "To make decisions, TD must be prioritized."},
    {AhaGroup::TdManagement, "Ignoring TD", "It is not always reasonable to fix (all) TD."},
    {AhaGroup::Business, "Invisible", "TD are invisible in themselves and can only be recognized through symptoms."},
    {AhaGroup::Business, "Perspective", "Causes and consequences of TD can be difficult to discern from a business/management perspective."},
}};

inline constexpr std::size_t kAhaCount = kAhaRegistry.size();

// A validated reference to one registry row.
class AhaTag {
 public:
  constexpr AhaTag() = default;

  static constexpr std::optional<AhaTag> find(AhaGroup g, std::string_view variable) {
    for (std::size_t i = 0; i < kAhaCount; ++i)
      if (kAhaRegistry[i].group == g && kAhaRegistry[i].variable == variable)
        return AhaTag(static_cast<std::uint8_t>(i));
    return std::nullopt;
  }

  // Parses "Group/Variable", e.g. "Repayment/Time-consuming".
  static std::optional<AhaTag> parse(std::string_view key) {
    for (std::size_t i = 0; i < kAhaCount; ++i)
      if (key_of(i) == key) return AhaTag(static_cast<std::uint8_t>(i));
    return std::nullopt;
  }

  static constexpr AhaTag at(std::size_t row) {
    if (row >= kAhaCount) throw std::out_of_range("aha row out of range");
    return AhaTag(static_cast<std::uint8_t>(row));
  }

  constexpr std::size_t row() const { return row_; }
  constexpr AhaGroup group() const { return kAhaRegistry[row_].group; }
  constexpr std::string_view variable() const { return kAhaRegistry[row_].variable; }
  constexpr std::string_view description() const { return kAhaRegistry[row_].description; }
  std::string key() const { return key_of(row_); }

  friend constexpr auto operator<=>(AhaTag, AhaTag) = default;

 private:
  constexpr explicit AhaTag(std::uint8_t row) : row_(row) {}
  static std::string key_of(std::size_t i) {
    std::string k(to_string(kAhaRegistry[i].group));
    k += '/';
    k += kAhaRegistry[i].variable;
    return k;
  }
  std::uint8_t row_ = 0;
};

namespace aha {

constexpr AhaTag tag(AhaGroup g, std::string_view v) {
  auto t = AhaTag::find(g, v);
  if (!t) throw std::logic_error("unknown aha tag");
  return *t;
}

inline constexpr AhaTag kConscious = tag(AhaGroup::Incurrence, "Conscious");
inline constexpr AhaTag kUnconscious = tag(AhaGroup::Incurrence, "Unconscious");
inline constexpr AhaTag kRepayDifficult = tag(AhaGroup::Repayment, "Difficult");
inline constexpr AhaTag kRepayTimeConsuming = tag(AhaGroup::Repayment, "Time-consuming");
inline constexpr AhaTag kRepayBenefits = tag(AhaGroup::Repayment, "Benefits");
inline constexpr AhaTag kArchCritical = tag(AhaGroup::Architecture, "Critical");
inline constexpr AhaTag kArchHardToRepay = tag(AhaGroup::Architecture, "Hard to repay");
inline constexpr AhaTag kInnerCycle = tag(AhaGroup::ViciousCycle, "Inner");

// Rows that game mechanics emit on their own, independent of card content.
inline constexpr std::array<AhaTag, 8> kIntrinsic{kConscious,         kUnconscious,    kRepayDifficult,
                                                  kRepayTimeConsuming, kRepayBenefits,  kArchCritical,
                                                  kArchHardToRepay,    kInnerCycle};

constexpr bool is_intrinsic(AhaTag t) {
  for (AhaTag i : kIntrinsic)
    if (i == t) return true;
  return false;
}

}  // namespace aha

using AhaCounts = std::array<int, kAhaCount>;

}  // namespace techdebt
