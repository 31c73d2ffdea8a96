#pragma once

#include <cstdint>
#include <type_traits>

namespace touchcore {

/// Engine-unique identity of one cursor lifecycle (DOWN .. UP/CANCEL).
enum class CursorId : std::uint64_t {};

/// Identity of a component within its scene. The canvas is always 0.
enum class ComponentId : std::uint64_t {};

template <typename E>
constexpr std::underlying_type_t<E> to_underlying(E e) noexcept {
  return static_cast<std::underlying_type_t<E>>(e);
}

}  // namespace touchcore
