#include "wedgepipe/public_suffix.hpp"

#include <algorithm>
#include <cctype>
#include <vector>

namespace wedgepipe {

namespace detail {
extern const std::string_view kBundledPublicSuffixList;
}

namespace {

std::string lower_ascii(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

std::vector<std::string_view> split_labels(std::string_view host) {
  std::vector<std::string_view> labels;
  std::size_t start = 0;
  while (true) {
    auto dot = host.find('.', start);
    labels.push_back(host.substr(start, dot == std::string_view::npos ? std::string_view::npos : dot - start));
    if (dot == std::string_view::npos) break;
    start = dot + 1;
  }
  return labels;
}

std::string join_from(const std::vector<std::string_view>& labels, std::size_t from) {
  std::string out;
  for (std::size_t i = from; i < labels.size(); ++i) {
    if (i > from) out += '.';
    out += labels[i];
  }
  return out;
}

}  // namespace

PublicSuffixList PublicSuffixList::parse(std::string_view text, bool include_private) {
  PublicSuffixList list;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto eol = text.find('\n', pos);
    std::string_view line = text.substr(pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
    pos = eol == std::string_view::npos ? text.size() : eol + 1;

    if (line.find("===BEGIN PRIVATE DOMAINS===") != std::string_view::npos && !include_private) break;
    auto ws = line.find_first_of(" \t\r");
    if (ws != std::string_view::npos) line = line.substr(0, ws);
    if (line.empty() || line.starts_with("//")) continue;

    std::string rule = lower_ascii(line);
    if (rule.starts_with('!')) {
      list.exceptions_.insert(rule.substr(1));
    } else if (rule.starts_with("*.")) {
      list.wildcards_.insert(rule.substr(2));
    } else {
      list.rules_.insert(std::move(rule));
    }
  }
  return list;
}

const PublicSuffixList& PublicSuffixList::bundled() {
  static const PublicSuffixList list = parse(detail::kBundledPublicSuffixList);
  return list;
}

std::optional<std::string> PublicSuffixList::registrable_domain(std::string_view host_in) const {
  std::string host = lower_ascii(host_in);
  while (!host.empty() && host.back() == '.') host.pop_back();
  if (host.empty()) return std::nullopt;
  auto labels = split_labels(host);
  for (auto l : labels) {
    if (l.empty()) return std::nullopt;
  }
  const std::size_t n = labels.size();

  // Length (in labels) of the public suffix.
  std::size_t suffix_len = 0;
  bool exception = false;
  for (std::size_t i = 0; i < n && !exception; ++i) {
    std::string candidate = join_from(labels, i);
    if (exceptions_.count(candidate)) {
      suffix_len = n - i - 1;
      exception = true;
    }
  }
  if (!exception) {
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t len = n - i;
      if (len <= suffix_len) break;
      std::string candidate = join_from(labels, i);
      if (rules_.count(candidate)) suffix_len = std::max(suffix_len, len);
      if (i + 1 < n && wildcards_.count(join_from(labels, i + 1))) suffix_len = std::max(suffix_len, len);
    }
    // Default rule "*": the top label is a suffix.
    suffix_len = std::max<std::size_t>(suffix_len, 1);
  }
  if (suffix_len >= n) return std::nullopt;
  return join_from(labels, n - suffix_len - 1);
}

std::optional<std::string> url_host(std::string_view url) {
  auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; };
  while (!url.empty() && is_space(url.front())) url.remove_prefix(1);
  while (!url.empty() && is_space(url.back())) url.remove_suffix(1);

  auto sep = url.find("://");
  if (sep == std::string_view::npos || sep == 0) return std::nullopt;
  if (!std::isalpha(static_cast<unsigned char>(url[0]))) return std::nullopt;
  for (std::size_t i = 1; i < sep; ++i) {
    char c = url[i];
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '+' && c != '-' && c != '.') return std::nullopt;
  }
  std::string_view rest = url.substr(sep + 3);
  auto end = rest.find_first_of("/?#");
  std::string_view authority = rest.substr(0, end);
  if (auto at = authority.rfind('@'); at != std::string_view::npos) authority.remove_prefix(at + 1);
  if (authority.empty() || authority.front() == '[') return std::nullopt;
  if (auto colon = authority.find(':'); colon != std::string_view::npos) {
    for (char c : authority.substr(colon + 1)) {
      if (!std::isdigit(static_cast<unsigned char>(c))) return std::nullopt;
    }
    authority = authority.substr(0, colon);
  }

  std::string host = lower_ascii(authority);
  while (!host.empty() && host.back() == '.') host.pop_back();
  if (host.empty() || host.front() == '.') return std::nullopt;
  bool all_numeric = true;
  for (char c : host) {
    auto uc = static_cast<unsigned char>(c);
    if (uc < 0x80 && !std::isalnum(uc) && c != '-' && c != '.') return std::nullopt;
    if (!std::isdigit(uc) && c != '.') all_numeric = false;
  }
  if (all_numeric) return std::nullopt;
  if (host.find("..") != std::string::npos) return std::nullopt;
  return host;
}

}  // namespace wedgepipe
