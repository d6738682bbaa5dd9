#pragma once

// Module registry and config-file machinery.
//
// A config file is a JSON-lines object file (see core/serialization.hpp).
// Each configurable module is one line whose class is the registered class
// name and whose fields hold its parameters and slots:
//   param        any property kind except config-reference / container
//   slot         {"$config": id}
//   list slot    {"$ref": id} naming a PropertyContainer line whose entries
//                are config-references in order
// The top-level object carries "root": true.

#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "mcslam/core/error.hpp"
#include "mcslam/core/property.hpp"

namespace mcslam::config {

struct SlotSpec {
  std::string name;
  bool optional = false;
  bool list = false;
};

class Configurable;
using ConfigurablePtr = std::shared_ptr<Configurable>;

class Configurable {
 public:
  virtual ~Configurable() = default;

  const std::string& class_name() const { return class_name_; }
  const core::PropertyContainer& params() const { return params_; }
  const std::vector<SlotSpec>& slot_specs() const { return slot_specs_; }

  /// UnknownParam for names not registered; ParamKindMismatch when the kind
  /// differs from the registered default (an int is accepted for a float).
  void set_param(std::string_view name, core::PropertyValue value);

  template <typename T>
  const T& param(std::string_view name) const {
    return params_.get<T>(name);
  }

  void set_slot(std::string_view name, ConfigurablePtr module);
  void set_slot_list(std::string_view name, std::vector<ConfigurablePtr> modules);
  void add_to_slot(std::string_view name, ConfigurablePtr module);

  /// Empty pointer when an optional slot is unset.
  ConfigurablePtr slot(std::string_view name) const;
  /// Modules held by a slot of either kind, in order.
  const std::vector<ConfigurablePtr>& slot_list(std::string_view name) const;

  /// Typed slot access. ParamKindMismatch when the module has the wrong type.
  template <typename T>
  T* slot_as(std::string_view name) const {
    return cast<T>(slot(name).get(), name);
  }
  template <typename T>
  std::vector<T*> slot_list_as(std::string_view name) const {
    std::vector<T*> out;
    for (const auto& m : slot_list(name)) out.push_back(cast<T>(m.get(), name));
    return out;
  }

  /// Reads parameters and slots into the module's working state. Called by
  /// finalize once the tree is wired; call finalize again after set_param.
  virtual void configure() {}

 private:
  friend class Registry;

  const SlotSpec& slot_spec(std::string_view name) const;

  template <typename T>
  T* cast(Configurable* m, std::string_view slot_name) const {
    if (m == nullptr) return nullptr;
    auto* t = dynamic_cast<T*>(m);
    if (t == nullptr) {
      throw Error(ErrorCode::ParamKindMismatch, class_name_ + "." + std::string(slot_name) +
                                                    " cannot hold a " + m->class_name());
    }
    return t;
  }

  std::string class_name_;
  core::PropertyContainer params_;
  std::vector<SlotSpec> slot_specs_;
  std::map<std::string, std::vector<ConfigurablePtr>, std::less<>> slots_;
};

struct ClassSpec {
  std::string class_name;
  core::PropertyContainer defaults;
  std::vector<SlotSpec> slots;
  std::function<ConfigurablePtr()> factory;
};

class Registry {
 public:
  /// DuplicateClass when the name is taken.
  void add(ClassSpec spec);

  template <typename T>
  void add(std::string name, core::PropertyContainer defaults, std::vector<SlotSpec> slots = {}) {
    add(ClassSpec{std::move(name), std::move(defaults), std::move(slots), [] { return std::make_shared<T>(); }});
  }

  bool contains(std::string_view name) const;
  /// UnknownClass when absent.
  const ClassSpec& spec(std::string_view name) const;
  std::vector<std::string> class_names() const;

  /// A fresh module with default parameters and empty slots. Not configured.
  ConfigurablePtr create(std::string_view name) const;

 private:
  std::map<std::string, ClassSpec, std::less<>> classes_;
};

/// Checks required slots (MissingRequiredSlot) and configures every module
/// reachable from `root`, children before parents, shared modules once.
/// CycleDetected when a module reaches itself.
void finalize(Configurable& root);

/// Builds the module tree described by a config file. Shared references
/// yield shared modules. Errors: ParseError, DanglingReference,
/// CycleDetected, UnknownClass, UnknownParam, ParamKindMismatch,
/// MissingRequiredSlot.
ConfigurablePtr instantiate(std::string_view text, const Registry& registry);

/// Config file for the tree under `root`; every module appears once and
/// after everything it references.
std::string write_config(const Configurable& root);

}  // namespace mcslam::config
