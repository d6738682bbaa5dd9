#include "mcslam/config/configurable.hpp"

#include <functional>
#include <set>
#include <unordered_map>

#include "mcslam/core/serialization.hpp"

namespace mcslam::config {

using core::ConfigReference;
using core::NestedContainer;
using core::PropertyContainer;
using core::PropertyKind;
using core::PropertyValue;

// ---------------------------------------------------------------- Configurable

void Configurable::set_param(std::string_view name, PropertyValue value) {
  const PropertyValue* current = params_.find(name);
  if (current == nullptr) {
    throw Error(ErrorCode::UnknownParam, class_name_ + " has no parameter '" + std::string(name) + "'");
  }
  const PropertyKind want = core::kind_of(*current);
  if (want == PropertyKind::Float && core::kind_of(value) == PropertyKind::Int) {
    value = static_cast<double>(std::get<std::int64_t>(value));
  }
  if (core::kind_of(value) != want) {
    throw Error(ErrorCode::ParamKindMismatch, class_name_ + "." + std::string(name) + " expects " +
                                                  std::string(core::to_string(want)) + ", got " +
                                                  std::string(core::to_string(core::kind_of(value))));
  }
  params_.put(name, std::move(value));
}

const SlotSpec& Configurable::slot_spec(std::string_view name) const {
  for (const auto& s : slot_specs_) {
    if (s.name == name) return s;
  }
  throw Error(ErrorCode::UnknownParam, class_name_ + " has no slot '" + std::string(name) + "'");
}

void Configurable::set_slot(std::string_view name, ConfigurablePtr module) {
  const auto& spec = slot_spec(name);
  if (spec.list) throw Error(ErrorCode::ParamKindMismatch, class_name_ + "." + spec.name + " is a list slot");
  auto& held = slots_[spec.name];
  held.clear();
  if (module) held.push_back(std::move(module));
}

void Configurable::set_slot_list(std::string_view name, std::vector<ConfigurablePtr> modules) {
  const auto& spec = slot_spec(name);
  if (!spec.list) throw Error(ErrorCode::ParamKindMismatch, class_name_ + "." + spec.name + " is a single slot");
  slots_[spec.name] = std::move(modules);
}

void Configurable::add_to_slot(std::string_view name, ConfigurablePtr module) {
  const auto& spec = slot_spec(name);
  if (!spec.list) throw Error(ErrorCode::ParamKindMismatch, class_name_ + "." + spec.name + " is a single slot");
  slots_[spec.name].push_back(std::move(module));
}

ConfigurablePtr Configurable::slot(std::string_view name) const {
  const auto& spec = slot_spec(name);
  const auto it = slots_.find(spec.name);
  return it == slots_.end() || it->second.empty() ? nullptr : it->second.front();
}

const std::vector<ConfigurablePtr>& Configurable::slot_list(std::string_view name) const {
  static const std::vector<ConfigurablePtr> kEmpty;
  const auto& spec = slot_spec(name);
  const auto it = slots_.find(spec.name);
  return it == slots_.end() ? kEmpty : it->second;
}

// ---------------------------------------------------------------- Registry

void Registry::add(ClassSpec spec) {
  if (spec.class_name.empty() || !spec.factory) {
    throw Error(ErrorCode::InvalidArgument, "class spec needs a name and a factory");
  }
  for (const auto& p : spec.defaults) {
    const auto k = p.kind();
    if (k == PropertyKind::ConfigReference || k == PropertyKind::Container) {
      throw Error(ErrorCode::InvalidArgument, spec.class_name + "." + p.name + ": parameters cannot be references");
    }
    for (const auto& s : spec.slots) {
      if (s.name == p.name) throw Error(ErrorCode::InvalidArgument, spec.class_name + "." + p.name + " is both slot and param");
    }
  }
  const std::string name = spec.class_name;
  if (!classes_.emplace(name, std::move(spec)).second) {
    throw Error(ErrorCode::DuplicateClass, "class '" + name + "' is already registered");
  }
}

bool Registry::contains(std::string_view name) const { return classes_.find(name) != classes_.end(); }

const ClassSpec& Registry::spec(std::string_view name) const {
  const auto it = classes_.find(name);
  if (it == classes_.end()) throw Error(ErrorCode::UnknownClass, "unknown class '" + std::string(name) + "'");
  return it->second;
}

std::vector<std::string> Registry::class_names() const {
  std::vector<std::string> out;
  for (const auto& [name, _] : classes_) out.push_back(name);
  return out;
}

ConfigurablePtr Registry::create(std::string_view name) const {
  const ClassSpec& s = spec(name);
  ConfigurablePtr m = s.factory();
  m->class_name_ = s.class_name;
  m->params_ = s.defaults;
  m->slot_specs_ = s.slots;
  return m;
}

// ---------------------------------------------------------------- finalize

namespace {

void finalize_visit(Configurable& m, std::set<const Configurable*>& done, std::vector<const Configurable*>& stack) {
  if (done.contains(&m)) return;
  for (const auto* s : stack) {
    if (s == &m) throw Error(ErrorCode::CycleDetected, m.class_name() + " references itself through its slots");
  }
  stack.push_back(&m);
  for (const auto& spec : m.slot_specs()) {
    const auto& held = m.slot_list(spec.name);
    if (!spec.optional && held.empty()) {
      throw Error(ErrorCode::MissingRequiredSlot, m.class_name() + "." + spec.name + " is required");
    }
    for (const auto& child : held) finalize_visit(*child, done, stack);
  }
  stack.pop_back();
  m.configure();
  done.insert(&m);
}

void check_cycles(const core::ObjectReader& reader) {
  enum class Mark { None, Active, Done };
  std::unordered_map<std::int64_t, Mark> mark;
  std::unordered_map<std::int64_t, std::vector<std::int64_t>> edges;
  for (const auto& obj : reader.objects()) edges[obj.id] = core::ObjectReader::references(obj);

  std::function<void(std::int64_t)> visit = [&](std::int64_t id) {
    auto& m = mark[id];
    if (m == Mark::Done) return;
    if (m == Mark::Active) throw Error(ErrorCode::CycleDetected, "reference cycle through id " + std::to_string(id));
    m = Mark::Active;
    for (const auto next : edges[id]) {
      if (reader.find(next) != nullptr) visit(next);
    }
    mark[id] = Mark::Done;
  };
  for (const auto& obj : reader.objects()) visit(obj.id);
}

Configurable& module_for(const std::unordered_map<std::int64_t, ConfigurablePtr>& modules, std::int64_t id,
                         const Configurable& referrer, const std::string& slot) {
  const auto it = modules.find(id);
  if (it == modules.end()) {
    throw Error(ErrorCode::ParamKindMismatch, referrer.class_name() + "." + slot + ": id " + std::to_string(id) +
                                                  " is not a module");
  }
  return *it->second;
}

}  // namespace

void finalize(Configurable& root) {
  std::set<const Configurable*> done;
  std::vector<const Configurable*> stack;
  finalize_visit(root, done, stack);
}

// ---------------------------------------------------------------- instantiate

ConfigurablePtr instantiate(std::string_view text, const Registry& registry) {
  core::ObjectReader reader(text);
  check_cycles(reader);

  const core::SerializedObject* root_obj = nullptr;
  for (const auto& obj : reader.objects()) {
    if (!obj.root) continue;
    if (root_obj != nullptr) throw Error(ErrorCode::ParseError, "line " + std::to_string(obj.line) + ": second root object");
    root_obj = &obj;
  }
  if (root_obj == nullptr) throw Error(ErrorCode::ParseError, "config has no object marked \"root\": true");

  std::unordered_map<std::int64_t, ConfigurablePtr> modules;
  for (const auto& obj : reader.objects()) {
    if (obj.class_name == core::kContainerClass) continue;
    ConfigurablePtr m = registry.create(obj.class_name);
    const PropertyContainer fields = reader.decode_fields(obj);
    for (const auto& p : fields) {
      const SlotSpec* spec = nullptr;
      for (const auto& s : m->slot_specs()) {
        if (s.name == p.name) spec = &s;
      }
      if (spec == nullptr) {
        m->set_param(p.name, p.value);
        continue;
      }
      if (spec->list) {
        const auto* list = std::get_if<NestedContainer>(&p.value);
        if (list == nullptr) {
          throw Error(ErrorCode::ParamKindMismatch, obj.class_name + "." + p.name + " expects a list of modules");
        }
        std::vector<ConfigurablePtr> held;
        for (const auto& entry : list->get()) {
          const auto* ref = std::get_if<ConfigReference>(&entry.value);
          if (ref == nullptr) {
            throw Error(ErrorCode::ParamKindMismatch, obj.class_name + "." + p.name + " entries must be modules");
          }
          module_for(modules, ref->id, *m, p.name);
          held.push_back(modules.at(ref->id));
        }
        m->set_slot_list(p.name, std::move(held));
      } else {
        const auto* ref = std::get_if<ConfigReference>(&p.value);
        if (ref == nullptr) throw Error(ErrorCode::ParamKindMismatch, obj.class_name + "." + p.name + " expects a module");
        module_for(modules, ref->id, *m, p.name);
        m->set_slot(p.name, modules.at(ref->id));
      }
    }
    modules.emplace(obj.id, std::move(m));
  }

  const auto it = modules.find(root_obj->id);
  if (it == modules.end()) throw Error(ErrorCode::ParseError, "root object must be a module");
  finalize(*it->second);
  return it->second;
}

// ---------------------------------------------------------------- write_config

namespace {

class ConfigWriter {
 public:
  std::int64_t emit(const Configurable& m, bool root) {
    if (const auto it = ids_.find(&m); it != ids_.end()) return it->second;
    core::Json fields = core::Json::object();
    for (const auto& p : m.params()) fields[p.name] = writer_.encode(p.value);
    for (const auto& spec : m.slot_specs()) {
      const auto& held = m.slot_list(spec.name);
      if (spec.list) {
        PropertyContainer list;
        for (std::size_t i = 0; i < held.size(); ++i) list.set(std::to_string(i), ConfigReference{emit(*held[i], false)});
        fields[spec.name] = writer_.encode(NestedContainer(std::move(list)));
      } else if (!held.empty()) {
        fields[spec.name] = writer_.encode(ConfigReference{emit(*held.front(), false)});
      }
    }
    const std::int64_t id = writer_.reserve_id();
    writer_.write(m.class_name(), id, std::move(fields), root);
    ids_.emplace(&m, id);
    return id;
  }

  const std::string& text() const { return writer_.text(); }

 private:
  core::ObjectWriter writer_;
  std::unordered_map<const Configurable*, std::int64_t> ids_;
};

}  // namespace

std::string write_config(const Configurable& root) {
  ConfigWriter w;
  w.emit(root, true);
  return w.text();
}

}  // namespace mcslam::config
