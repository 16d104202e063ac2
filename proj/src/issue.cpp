#include "wedgepipe/issue.hpp"

namespace wedgepipe {

std::string_view to_string(Issue issue) {
  switch (issue) {
    case Issue::origins: return "origins";
    case Issue::lockdowns: return "lockdowns";
    case Issue::masking: return "masking";
    case Issue::education: return "education";
    case Issue::vaccines: return "vaccines";
  }
  return "origins";
}

std::optional<Issue> parse_issue(std::string_view name) {
  for (auto i : kAllIssues) {
    if (to_string(i) == name) return i;
  }
  return std::nullopt;
}

std::vector<Issue> IssueSet::to_vector() const {
  std::vector<Issue> out;
  for (auto i : kAllIssues) {
    if (contains(i)) out.push_back(i);
  }
  return out;
}

}  // namespace wedgepipe
