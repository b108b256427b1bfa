#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace wirecons {

enum class Protocol { pbft, raft };

constexpr std::string_view to_string(Protocol p) {
  return p == Protocol::pbft ? "pbft" : "raft";
}

inline Protocol protocol_from_string(std::string_view s) {
  if (s == "pbft") return Protocol::pbft;
  if (s == "raft") return Protocol::raft;
  throw std::invalid_argument("unknown protocol '" + std::string(s) +
                              "' (expected pbft or raft)");
}

}  // namespace wirecons
