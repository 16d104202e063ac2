#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <unordered_set>

namespace wedgepipe {

/// Public suffix rules (normal, wildcard and exception) used to find the
/// registrable ("pay-level") domain of a host name.
class PublicSuffixList {
 public:
  /// Parses the publicsuffix.org text format. Only the ICANN section is used
  /// unless `include_private` is set.
  static PublicSuffixList parse(std::string_view text, bool include_private = false);

  /// Rules compiled into the library from data/public_suffix_list.dat.
  static const PublicSuffixList& bundled();

  /// Public suffix plus one label, lowercased; nullopt if the host is itself
  /// a public suffix or is not a valid domain name.
  std::optional<std::string> registrable_domain(std::string_view host) const;

  std::size_t rule_count() const noexcept { return rules_.size() + wildcards_.size() + exceptions_.size(); }

 private:
  std::unordered_set<std::string> rules_;
  std::unordered_set<std::string> wildcards_;   ///< "*.ck" stored as "ck"
  std::unordered_set<std::string> exceptions_;  ///< "!www.ck" stored as "www.ck"
};

/// Host component of an absolute URL (`scheme://[user@]host[:port]/...`),
/// lowercased and without a trailing dot. nullopt for anything else,
/// including IP-literal hosts.
std::optional<std::string> url_host(std::string_view url);

}  // namespace wedgepipe
