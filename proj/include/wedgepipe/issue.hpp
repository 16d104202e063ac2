#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

namespace wedgepipe {

enum class Issue : std::uint8_t { origins, lockdowns, masking, education, vaccines };

inline constexpr std::array<Issue, 5> kAllIssues{Issue::origins, Issue::lockdowns, Issue::masking, Issue::education,
                                                 Issue::vaccines};

std::string_view to_string(Issue issue);
std::optional<Issue> parse_issue(std::string_view name);

/// Small bit set over the five issues.
class IssueSet {
 public:
  constexpr IssueSet() = default;
  constexpr IssueSet(std::initializer_list<Issue> issues) {
    for (auto i : issues) insert(i);
  }

  static constexpr IssueSet from_bits(std::uint8_t bits) {
    IssueSet s;
    s.bits_ = bits & 0x1F;
    return s;
  }

  constexpr void insert(Issue i) { bits_ |= bit(i); }
  constexpr bool contains(Issue i) const { return (bits_ & bit(i)) != 0; }
  constexpr bool empty() const { return bits_ == 0; }
  constexpr std::uint8_t bits() const { return bits_; }
  constexpr IssueSet& operator|=(IssueSet o) {
    bits_ |= o.bits_;
    return *this;
  }

  std::vector<Issue> to_vector() const;

  friend constexpr bool operator==(IssueSet, IssueSet) = default;

 private:
  static constexpr std::uint8_t bit(Issue i) { return static_cast<std::uint8_t>(1u << static_cast<unsigned>(i)); }
  std::uint8_t bits_ = 0;
};

}  // namespace wedgepipe
