#pragma once

// JSON-lines object codec shared by config files, graph files and standalone
// property containers.
//
// Every line is one object:
//   {"class": <name>, "id": <int>, "fields": {<name>: <value>, ...}[, "root": true]}
//
// Field values by kind:
//   bool, int, string    JSON scalar
//   float                JSON number with a fraction or exponent (shortest
//                        round-trip digits); non-finite as {"$float":"inf"}
//   float-vector         JSON array of numbers
//   pose2                {"$pose2":[x, y, theta]}
//   point-cloud-2        {"$cloud":{"points":[x0,y0,...],"normals":[...]}}
//   config-reference     {"$config": <id>}
//   container            {"$ref": <id>}  (a PropertyContainer line)
//
// A referenced id must appear on an earlier line.

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "mcslam/core/property.hpp"

namespace mcslam::core {

using Json = nlohmann::ordered_json;

inline constexpr std::string_view kContainerClass = "PropertyContainer";

struct SerializedObject {
  std::string class_name;
  std::int64_t id = 0;
  Json fields = Json::object();
  bool root = false;
  std::size_t line = 0;  // 1-based source line
};

/// Shortest decimal text that parses back to the same double.
std::string format_double(double v);

class ObjectWriter {
 public:
  std::int64_t reserve_id() { return next_id_++; }

  /// Emits `c` (and any nested containers before it); returns its id.
  std::int64_t write_container(const PropertyContainer& c);

  /// Encodes one value; nested containers are written out first.
  Json encode(const PropertyValue& v);
  Json encode_fields(const PropertyContainer& c);

  void write(std::string_view class_name, std::int64_t id, Json fields, bool root = false);

  const std::string& text() const { return text_; }

 private:
  std::int64_t next_id_ = 0;
  std::string text_;
};

class ObjectReader {
 public:
  /// Parses every non-blank line. ParseError on malformed JSON or a line
  /// without class/id/fields; duplicate ids are a ParseError too.
  explicit ObjectReader(std::string_view text);

  const std::vector<SerializedObject>& objects() const { return objects_; }
  const SerializedObject* find(std::int64_t id) const;

  /// Decodes a field value appearing in `referrer`. DanglingReference when
  /// a referenced id is undefined or not defined before the referrer.
  PropertyValue decode(const Json& value, const SerializedObject& referrer);
  PropertyContainer decode_fields(const SerializedObject& obj);

  /// The PropertyContainer stored under `id`, decoded once and cached.
  const PropertyContainer& container(std::int64_t id, const SerializedObject& referrer);

  /// Ids referenced ($config or $ref) anywhere in the object's fields.
  static std::vector<std::int64_t> references(const SerializedObject& obj);

 private:
  const SerializedObject& require_earlier(std::int64_t id, const SerializedObject& referrer) const;

  std::vector<SerializedObject> objects_;
  std::map<std::int64_t, std::size_t> by_id_;
  std::map<std::int64_t, PropertyContainer> decoded_;
};

std::string serialize_container(const PropertyContainer& c);
/// The container on the last line is returned; earlier lines may only be
/// nested containers. UnknownClass for any other class name.
PropertyContainer deserialize_container(std::string_view text);

}  // namespace mcslam::core
