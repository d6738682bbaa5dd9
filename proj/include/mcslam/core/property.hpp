#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <type_traits>
#include <unordered_map>
#include <variant>
#include <vector>

#include "mcslam/core/error.hpp"
#include "mcslam/geometry/point_cloud.hpp"
#include "mcslam/geometry/pose2.hpp"

namespace mcslam::core {

enum class PropertyKind : std::uint8_t {
  Bool,
  Int,
  Float,
  String,
  FloatVector,
  Pose2,
  PointCloud2,
  ConfigReference,
  Container,
};

std::string_view to_string(PropertyKind kind);

/// Id of another serialized object (a Configurable) in the same file.
struct ConfigReference {
  std::int64_t id = 0;
  friend bool operator==(const ConfigReference&, const ConfigReference&) = default;
};

class PropertyContainer;

/// Owning, deep-copying handle so containers can nest by value.
class NestedContainer {
 public:
  NestedContainer();
  NestedContainer(PropertyContainer c);  // NOLINT(google-explicit-constructor)
  NestedContainer(const NestedContainer& other);
  NestedContainer(NestedContainer&&) noexcept = default;
  NestedContainer& operator=(const NestedContainer& other);
  NestedContainer& operator=(NestedContainer&&) noexcept = default;
  ~NestedContainer();

  const PropertyContainer& get() const { return *ptr_; }
  PropertyContainer& get() { return *ptr_; }

  friend bool operator==(const NestedContainer& a, const NestedContainer& b);

 private:
  std::unique_ptr<PropertyContainer> ptr_;
};

// Alternative order matches PropertyKind.
using PropertyValue = std::variant<bool, std::int64_t, double, std::string, std::vector<double>,
                                   geometry::Pose2, geometry::PointCloud2, ConfigReference, NestedContainer>;

inline PropertyKind kind_of(const PropertyValue& v) { return static_cast<PropertyKind>(v.index()); }

struct Property {
  std::string name;
  PropertyValue value;

  PropertyKind kind() const { return kind_of(value); }
  friend bool operator==(const Property&, const Property&) = default;
};

namespace detail {
template <typename T>
auto normalize(T&& v) {
  using D = std::remove_cvref_t<T>;
  if constexpr (std::is_same_v<D, bool>) {
    return v;
  } else if constexpr (std::is_integral_v<D>) {
    return static_cast<std::int64_t>(v);
  } else if constexpr (std::is_floating_point_v<D>) {
    return static_cast<double>(v);
  } else if constexpr (std::is_convertible_v<D, std::string_view>) {
    return std::string(std::string_view(v));
  } else if constexpr (std::is_same_v<D, PropertyContainer>) {
    return NestedContainer(std::forward<T>(v));
  } else {
    return D(std::forward<T>(v));
  }
}

template <typename T, typename V>
struct variant_index;
template <typename T, typename... Ts>
struct variant_index<T, std::variant<Ts...>> {
  static constexpr std::size_t value = [] {
    std::size_t i = 0;
    ((std::is_same_v<T, Ts> ? true : (++i, false)) || ...);
    return i;
  }();
};

template <typename T>
struct stored { using type = T; };
template <>
struct stored<PropertyContainer> { using type = NestedContainer; };
}  // namespace detail

/// Named, typed cells in insertion order. Names are unique; an entry's kind
/// never changes once inserted.
class PropertyContainer {
 public:
  using const_iterator = std::vector<Property>::const_iterator;

  /// Inserts or replaces. Replacement must keep the kind
  /// (DuplicateKindMismatch otherwise) and keeps the original position.
  void put(std::string_view name, PropertyValue value);

  template <typename T>
  void set(std::string_view name, T&& v) {
    put(name, PropertyValue(detail::normalize(std::forward<T>(v))));
  }

  /// NotFound when absent; KindMismatch when the stored kind differs.
  const PropertyValue& get(std::string_view name, PropertyKind kind) const;

  template <typename T>
  const T& get(std::string_view name) const {
    using S = typename detail::stored<T>::type;
    const auto& v = get(name, static_cast<PropertyKind>(index_of<S>()));
    if constexpr (std::is_same_v<S, NestedContainer>) {
      return std::get<NestedContainer>(v).get();
    } else {
      return std::get<S>(v);
    }
  }

  const PropertyValue* find(std::string_view name) const;
  bool contains(std::string_view name) const { return find(name) != nullptr; }

  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  const_iterator begin() const { return entries_.begin(); }
  const_iterator end() const { return entries_.end(); }
  std::vector<std::string> names() const;

  friend bool operator==(const PropertyContainer& a, const PropertyContainer& b) {
    return a.entries_ == b.entries_;
  }

 private:
  template <typename S>
  static constexpr std::size_t index_of() {
    return detail::variant_index<S, PropertyValue>::value;
  }

  std::vector<Property> entries_;
  std::unordered_map<std::string, std::size_t> index_;
};

}  // namespace mcslam::core
