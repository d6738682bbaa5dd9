#include "mcslam/core/serialization.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

namespace mcslam::core {

using geometry::PointCloud2;
using geometry::Pose2;
using geometry::Vector2;

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

namespace {

Json encode_float(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return Json{{"$float", "nan"}};
  return Json{{"$float", v > 0 ? "inf" : "-inf"}};
}

Json encode_cloud(const PointCloud2& cloud) {
  Json points = Json::array();
  for (const auto& p : cloud.points) {
    points.push_back(p.x());
    points.push_back(p.y());
  }
  Json body = Json::object();
  body["points"] = std::move(points);
  if (cloud.has_normals()) {
    Json normals = Json::array();
    for (const auto& n : cloud.normals) {
      normals.push_back(n.x());
      normals.push_back(n.y());
    }
    body["normals"] = std::move(normals);
  }
  return Json{{"$cloud", std::move(body)}};
}

[[noreturn]] void parse_error(const SerializedObject& obj, const std::string& what) {
  throw Error(ErrorCode::ParseError, "line " + std::to_string(obj.line) + ": " + what);
}

double number(const Json& j, const SerializedObject& obj) {
  if (!j.is_number()) parse_error(obj, "expected a number, got " + j.dump());
  return j.get<double>();
}

std::vector<Vector2> pairs(const Json& flat, const SerializedObject& obj) {
  if (!flat.is_array() || flat.size() % 2 != 0) parse_error(obj, "point array must have even length");
  std::vector<Vector2> out;
  out.reserve(flat.size() / 2);
  for (std::size_t i = 0; i < flat.size(); i += 2) out.emplace_back(number(flat[i], obj), number(flat[i + 1], obj));
  return out;
}

bool single_key(const Json& j, std::string_view key) {
  return j.is_object() && j.size() == 1 && j.contains(std::string(key));
}

void collect_refs(const Json& j, std::vector<std::int64_t>& out) {
  if (single_key(j, "$config") && j["$config"].is_number_integer()) {
    out.push_back(j["$config"].get<std::int64_t>());
  } else if (single_key(j, "$ref") && j["$ref"].is_number_integer()) {
    out.push_back(j["$ref"].get<std::int64_t>());
  } else if (j.is_object() || j.is_array()) {
    for (const auto& child : j) collect_refs(child, out);
  }
}

}  // namespace

// ---------------------------------------------------------------- writer

std::int64_t ObjectWriter::write_container(const PropertyContainer& c) {
  Json fields = encode_fields(c);
  const auto id = reserve_id();
  write(kContainerClass, id, std::move(fields));
  return id;
}

Json ObjectWriter::encode(const PropertyValue& v) {
  return std::visit(
      [&](const auto& x) -> Json {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, double>) {
          return encode_float(x);
        } else if constexpr (std::is_same_v<T, std::vector<double>>) {
          Json arr = Json::array();
          for (double d : x) arr.push_back(encode_float(d));
          return arr;
        } else if constexpr (std::is_same_v<T, Pose2>) {
          return Json{{"$pose2", Json::array({x.x, x.y, x.theta})}};
        } else if constexpr (std::is_same_v<T, PointCloud2>) {
          return encode_cloud(x);
        } else if constexpr (std::is_same_v<T, ConfigReference>) {
          return Json{{"$config", x.id}};
        } else if constexpr (std::is_same_v<T, NestedContainer>) {
          return Json{{"$ref", write_container(x.get())}};
        } else {
          return x;
        }
      },
      v);
}

Json ObjectWriter::encode_fields(const PropertyContainer& c) {
  Json fields = Json::object();
  for (const auto& p : c) fields[p.name] = encode(p.value);
  return fields;
}

void ObjectWriter::write(std::string_view class_name, std::int64_t id, Json fields, bool root) {
  Json line = Json::object();
  line["class"] = class_name;
  line["id"] = id;
  line["fields"] = std::move(fields);
  if (root) line["root"] = true;
  text_ += line.dump();
  text_ += '\n';
}

// ---------------------------------------------------------------- reader

ObjectReader::ObjectReader(std::string_view text) {
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    const auto line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;

    SerializedObject obj;
    obj.line = line_no;
    Json j;
    try {
      j = Json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      parse_error(obj, e.what());
    }
    if (!j.is_object() || !j.contains("class") || !j["class"].is_string() || !j.contains("id") ||
        !j["id"].is_number_integer() || !j.contains("fields") || !j["fields"].is_object()) {
      parse_error(obj, "object line needs string 'class', integer 'id' and object 'fields'");
    }
    obj.class_name = j["class"].get<std::string>();
    obj.id = j["id"].get<std::int64_t>();
    if (obj.id < 0) parse_error(obj, "negative id");
    obj.fields = std::move(j["fields"]);
    if (j.contains("root")) {
      if (!j["root"].is_boolean()) parse_error(obj, "'root' must be boolean");
      obj.root = j["root"].get<bool>();
    }
    if (!by_id_.emplace(obj.id, objects_.size()).second) {
      parse_error(obj, "duplicate id " + std::to_string(obj.id));
    }
    objects_.push_back(std::move(obj));
  }
}

const SerializedObject* ObjectReader::find(std::int64_t id) const {
  const auto it = by_id_.find(id);
  return it == by_id_.end() ? nullptr : &objects_[it->second];
}

const SerializedObject& ObjectReader::require_earlier(std::int64_t id, const SerializedObject& referrer) const {
  const auto it = by_id_.find(id);
  if (it == by_id_.end() || objects_[it->second].line >= referrer.line) {
    throw Error(ErrorCode::DanglingReference, "line " + std::to_string(referrer.line) + ": id " +
                                                  std::to_string(id) + " is not defined on an earlier line");
  }
  return objects_[it->second];
}

const PropertyContainer& ObjectReader::container(std::int64_t id, const SerializedObject& referrer) {
  const SerializedObject& obj = require_earlier(id, referrer);
  if (obj.class_name != kContainerClass) {
    throw Error(ErrorCode::ParseError, "line " + std::to_string(referrer.line) + ": id " + std::to_string(id) +
                                           " is a " + obj.class_name + ", expected " +
                                           std::string(kContainerClass));
  }
  if (auto it = decoded_.find(id); it != decoded_.end()) return it->second;
  PropertyContainer c = decode_fields(obj);
  return decoded_.emplace(id, std::move(c)).first->second;
}

PropertyValue ObjectReader::decode(const Json& j, const SerializedObject& referrer) {
  switch (j.type()) {
    case Json::value_t::boolean: return j.get<bool>();
    case Json::value_t::number_integer:
    case Json::value_t::number_unsigned: return j.get<std::int64_t>();
    case Json::value_t::number_float: return j.get<double>();
    case Json::value_t::string: return j.get<std::string>();
    case Json::value_t::array: {
      std::vector<double> out;
      out.reserve(j.size());
      for (const auto& e : j) {
        if (single_key(e, "$float")) {
          out.push_back(std::get<double>(decode(e, referrer)));
        } else {
          out.push_back(number(e, referrer));
        }
      }
      return out;
    }
    case Json::value_t::object: {
      if (single_key(j, "$float")) {
        const auto s = j["$float"].is_string() ? j["$float"].get<std::string>() : std::string();
        if (s == "inf") return std::numeric_limits<double>::infinity();
        if (s == "-inf") return -std::numeric_limits<double>::infinity();
        if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
        parse_error(referrer, "bad $float value " + j.dump());
      }
      if (single_key(j, "$pose2")) {
        const auto& a = j["$pose2"];
        if (!a.is_array() || a.size() != 3) parse_error(referrer, "$pose2 needs 3 numbers");
        return Pose2(number(a[0], referrer), number(a[1], referrer), number(a[2], referrer));
      }
      if (single_key(j, "$cloud")) {
        const auto& body = j["$cloud"];
        if (!body.is_object() || !body.contains("points")) parse_error(referrer, "$cloud needs 'points'");
        PointCloud2 cloud;
        cloud.points = pairs(body["points"], referrer);
        if (body.contains("normals")) {
          cloud.normals = pairs(body["normals"], referrer);
          if (cloud.normals.size() != cloud.points.size()) parse_error(referrer, "normals/points length mismatch");
        }
        return cloud;
      }
      if (single_key(j, "$config")) {
        if (!j["$config"].is_number_integer()) parse_error(referrer, "$config needs an integer id");
        const auto id = j["$config"].get<std::int64_t>();
        require_earlier(id, referrer);
        return ConfigReference{id};
      }
      if (single_key(j, "$ref")) {
        if (!j["$ref"].is_number_integer()) parse_error(referrer, "$ref needs an integer id");
        return NestedContainer(container(j["$ref"].get<std::int64_t>(), referrer));
      }
      parse_error(referrer, "unrecognized tagged value " + j.dump());
    }
    default: parse_error(referrer, "unsupported value " + j.dump());
  }
}

PropertyContainer ObjectReader::decode_fields(const SerializedObject& obj) {
  PropertyContainer c;
  for (const auto& [name, value] : obj.fields.items()) c.put(name, decode(value, obj));
  return c;
}

std::vector<std::int64_t> ObjectReader::references(const SerializedObject& obj) {
  std::vector<std::int64_t> out;
  collect_refs(obj.fields, out);
  return out;
}

std::string serialize_container(const PropertyContainer& c) {
  ObjectWriter w;
  w.write_container(c);
  return w.text();
}

PropertyContainer deserialize_container(std::string_view text) {
  ObjectReader reader(text);
  if (reader.objects().empty()) throw Error(ErrorCode::ParseError, "no objects in input");
  for (const auto& obj : reader.objects()) {
    if (obj.class_name != kContainerClass) {
      throw Error(ErrorCode::UnknownClass,
                  "line " + std::to_string(obj.line) + ": unknown class '" + obj.class_name + "'");
    }
  }
  // decode every line so dangling references anywhere are reported
  for (const auto& obj : reader.objects()) reader.decode_fields(obj);
  return reader.decode_fields(reader.objects().back());
}

}  // namespace mcslam::core
