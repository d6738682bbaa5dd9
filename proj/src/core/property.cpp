#include "mcslam/core/property.hpp"

namespace mcslam::core {

std::string_view to_string(PropertyKind kind) {
  switch (kind) {
    case PropertyKind::Bool: return "bool";
    case PropertyKind::Int: return "int";
    case PropertyKind::Float: return "float";
    case PropertyKind::String: return "string";
    case PropertyKind::FloatVector: return "float-vector";
    case PropertyKind::Pose2: return "pose2";
    case PropertyKind::PointCloud2: return "point-cloud-2";
    case PropertyKind::ConfigReference: return "config-reference";
    case PropertyKind::Container: return "container";
  }
  return "unknown";
}

NestedContainer::NestedContainer() : ptr_(std::make_unique<PropertyContainer>()) {}
NestedContainer::NestedContainer(PropertyContainer c)
    : ptr_(std::make_unique<PropertyContainer>(std::move(c))) {}
NestedContainer::NestedContainer(const NestedContainer& other)
    : ptr_(std::make_unique<PropertyContainer>(*other.ptr_)) {}
NestedContainer& NestedContainer::operator=(const NestedContainer& other) {
  if (this != &other) ptr_ = std::make_unique<PropertyContainer>(*other.ptr_);
  return *this;
}
NestedContainer::~NestedContainer() = default;

bool operator==(const NestedContainer& a, const NestedContainer& b) { return *a.ptr_ == *b.ptr_; }

void PropertyContainer::put(std::string_view name, PropertyValue value) {
  if (name.empty()) throw Error(ErrorCode::InvalidArgument, "property name must be non-empty");
  const auto it = index_.find(std::string(name));
  if (it == index_.end()) {
    index_.emplace(std::string(name), entries_.size());
    entries_.push_back(Property{std::string(name), std::move(value)});
    return;
  }
  Property& existing = entries_[it->second];
  if (existing.kind() != kind_of(value)) {
    throw Error(ErrorCode::DuplicateKindMismatch,
                "property '" + std::string(name) + "' is " + std::string(to_string(existing.kind())) +
                    ", cannot replace with " + std::string(to_string(kind_of(value))));
  }
  existing.value = std::move(value);
}

const PropertyValue* PropertyContainer::find(std::string_view name) const {
  const auto it = index_.find(std::string(name));
  return it == index_.end() ? nullptr : &entries_[it->second].value;
}

const PropertyValue& PropertyContainer::get(std::string_view name, PropertyKind kind) const {
  const PropertyValue* v = find(name);
  if (v == nullptr) throw Error(ErrorCode::NotFound, "no property '" + std::string(name) + "'");
  if (kind_of(*v) != kind) {
    throw Error(ErrorCode::KindMismatch, "property '" + std::string(name) + "' is " +
                                             std::string(to_string(kind_of(*v))) + ", requested " +
                                             std::string(to_string(kind)));
  }
  return *v;
}

std::vector<std::string> PropertyContainer::names() const {
  std::vector<std::string> out;
  out.reserve(entries_.size());
  for (const auto& e : entries_) out.push_back(e.name);
  return out;
}

}  // namespace mcslam::core
