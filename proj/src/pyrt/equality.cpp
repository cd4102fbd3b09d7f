#include "xlv/py/equality.hpp"

#include <cmath>
#include <set>
#include <utility>

#include "xlv/errors.hpp"
#include "xlv/string_form.hpp"

namespace xlv::pyrt {

namespace {

enum class Group {
  none,
  boolean,
  number,
  text,
  bytes,
  duration,
  enumeration,
  exception,
  stream,
  sequence,
  tuple,
  set,
  mapping,
  object,
  other,
};

py::list as_list(py::handle v) { return py::list(py::reinterpret_borrow<py::object>(v)); }

std::string as_bytes(py::handle v) {
  return py::module_::import("builtins").attr("bytes")(v).cast<std::string>();
}

class Comparer {
 public:
  explicit Comparer(const EqualityConfig& cfg)
      : cfg_(cfg),
        enum_(py::module_::import("enum").attr("Enum")),
        timedelta_(py::module_::import("datetime").attr("timedelta")),
        deque_(py::module_::import("collections").attr("deque")),
        bytes_io_(py::module_::import("io").attr("BytesIO")),
        string_io_(py::module_::import("io").attr("StringIO")) {}

  bool equal(py::handle e, py::handle a, const std::string& path, int depth) {
    if (depth > cfg_.max_depth) {
      throw DepthExceededError("comparison exceeded max_depth " + std::to_string(cfg_.max_depth) + " at " + path);
    }
    if (e.ptr() == a.ptr()) return true;
    const auto pair = std::make_pair(e.ptr(), a.ptr());
    if (visited_.contains(pair)) return true;

    const Group ge = group(e);
    const Group ga = group(a);
    if (!compatible(ge, ga)) return fail(path, "type group differs");

    switch (ge) {
      case Group::none:
        return true;
      case Group::boolean:
        return e.ptr() == a.ptr() || fail(path, "boolean differs");
      case Group::number:
        return numbers_equal(e, a) || fail(path, "number differs");
      case Group::text:
        return texts_equal(e, a) || fail(path, "string differs");
      case Group::bytes:
        return as_bytes(e) == as_bytes(a) || fail(path, "bytes differ");
      case Group::duration: {
        const double de = e.attr("total_seconds")().cast<double>();
        const double da = a.attr("total_seconds")().cast<double>();
        return std::fabs(de - da) <= cfg_.duration_abs_tol_seconds || fail(path, "duration differs");
      }
      case Group::enumeration:
        return (qualname(e) == qualname(a) && e.attr("_name_").equal(a.attr("_name_"))) ||
               fail(path, "enum constant differs");
      case Group::stream:
        return streams_equal(e, a, path);
      default:
        break;
    }

    visited_.insert(pair);
    switch (ge) {
      case Group::exception:
        if (qualname(e) != qualname(a)) return fail(path, "exception type differs");
        if (py::str(e).cast<std::string>() != py::str(a).cast<std::string>()) {
          return fail(path, "exception message differs");
        }
        return attributes_equal(e, a, path, depth);
      case Group::sequence:
      case Group::tuple:
        return sequences_equal(e, a, path, depth);
      case Group::set:
        return sets_equal(e, a, path, depth);
      case Group::mapping:
        return mappings_equal(e, a, path, depth);
      case Group::object:
        if (qualname(e) != qualname(a)) return fail(path, "class differs");
        return attributes_equal(e, a, path, depth);
      default:
        return rich_equal(e, a) || fail(path, "values differ");
    }
  }

  const std::string& mismatch() const { return mismatch_; }

 private:
  Group group(py::handle v) const {
    PyObject* p = v.ptr();
    if (p == Py_None) return Group::none;
    if (PyBool_Check(p)) return Group::boolean;
    if (py::isinstance(v, enum_)) return Group::enumeration;
    if (PyLong_Check(p) || PyFloat_Check(p)) return Group::number;
    if (PyUnicode_Check(p)) return Group::text;
    if (PyBytes_Check(p) || PyByteArray_Check(p)) return Group::bytes;
    if (py::isinstance(v, timedelta_)) return Group::duration;
    if (PyExceptionInstance_Check(p)) return Group::exception;
    if (py::isinstance(v, bytes_io_) || py::isinstance(v, string_io_)) return Group::stream;
    if (PyList_Check(p) || py::isinstance(v, deque_)) return Group::sequence;
    if (PyTuple_Check(p)) return Group::tuple;
    if (PyAnySet_Check(p)) return Group::set;
    if (PyDict_Check(p)) return Group::mapping;
    if (!PyType_Check(p) && py::hasattr(v, "__dict__")) return Group::object;
    return Group::other;
  }

  static bool compatible(Group e, Group a) { return e == a; }

  static std::string qualname(py::handle v) {
    py::handle type = reinterpret_cast<PyObject*>(Py_TYPE(v.ptr()));
    return py::str(type.attr("__module__")).cast<std::string>() + "." +
           py::str(type.attr("__qualname__")).cast<std::string>();
  }

  bool fail(const std::string& path, const std::string& what) {
    if (probing_ == 0 && mismatch_.empty()) mismatch_ = path + ": " + what;
    return false;
  }

  bool numbers_equal(py::handle e, py::handle a) const {
    if (PyLong_Check(e.ptr()) && PyLong_Check(a.ptr())) return rich_equal(e, a);
    double de = 0;
    double da = 0;
    try {
      de = e.cast<double>();
      da = a.cast<double>();
    } catch (const py::cast_error&) {
      return rich_equal(e, a);
    }
    if (std::isnan(de) || std::isnan(da)) return std::isnan(de) && std::isnan(da);
    if (std::isinf(de) || std::isinf(da)) return de == da;
    const double bound = std::max(cfg_.float_rel_tol * std::max(std::fabs(de), std::fabs(da)), cfg_.float_abs_tol);
    return std::fabs(de - da) <= bound;
  }

  static bool texts_equal(py::handle e, py::handle a) {
    const std::string se = e.cast<std::string>();
    const std::string sa = a.cast<std::string>();
    return se == sa || string_form_equal(se, sa);
  }

  bool streams_equal(py::handle e, py::handle a, const std::string& path) {
    if (py::isinstance(e, bytes_io_) != py::isinstance(a, bytes_io_)) return fail(path, "stream kind differs");
    if (!e.attr("getvalue")().equal(a.attr("getvalue")())) return fail(path, "stream buffer differs");
    if (!e.attr("tell")().equal(a.attr("tell")())) return fail(path, "stream position differs");
    return true;
  }

  static bool rich_equal(py::handle e, py::handle a) {
    const int r = PyObject_RichCompareBool(e.ptr(), a.ptr(), Py_EQ);
    if (r < 0) {
      PyErr_Clear();
      return false;
    }
    return r == 1;
  }

  bool sequences_equal(py::handle e, py::handle a, const std::string& path, int depth) {
    py::list le = as_list(e);
    py::list la = as_list(a);
    if (le.size() != la.size()) return fail(path, "length differs");
    for (std::size_t i = 0; i < le.size(); ++i) {
      if (!equal(le[i], la[i], path + "[" + std::to_string(i) + "]", depth + 1)) return false;
    }
    return true;
  }

  // Equality test whose failure must not leak mismatch paths or cycle
  // assumptions into the enclosing comparison.
  bool probe(py::handle e, py::handle a, const std::string& path, int depth) {
    const auto saved = visited_;
    ++probing_;
    bool ok = false;
    try {
      ok = equal(e, a, path, depth);
    } catch (...) {
      --probing_;
      throw;
    }
    --probing_;
    if (!ok) visited_ = saved;
    return ok;
  }

  bool sets_equal(py::handle e, py::handle a, const std::string& path, int depth) {
    py::list le = as_list(e);
    py::list la = as_list(a);
    if (le.size() != la.size()) return fail(path, "size differs");
    std::vector<bool> used(la.size(), false);
    for (py::handle item : le) {
      bool matched = false;
      for (std::size_t j = 0; j < la.size() && !matched; ++j) {
        if (!used[j] && probe(item, la[j], path + "{}", depth + 1)) {
          used[j] = true;
          matched = true;
        }
      }
      if (!matched) return fail(path + "{" + py::repr(item).cast<std::string>() + "}", "no matching element");
    }
    return true;
  }

  bool mappings_equal(py::handle e, py::handle a, const std::string& path, int depth) {
    py::dict de = py::reinterpret_borrow<py::dict>(e);
    py::dict da = py::reinterpret_borrow<py::dict>(a);
    if (de.size() != da.size()) return fail(path, "size differs");
    std::set<PyObject*> used;
    for (auto [key, value] : de) {
      const std::string child = path + "[" + py::repr(key).cast<std::string>() + "]";
      PyObject* direct = PyDict_GetItemWithError(da.ptr(), key.ptr());
      if (!direct && PyErr_Occurred()) PyErr_Clear();
      if (direct) {
        if (!equal(value, direct, child, depth + 1)) return false;
        continue;
      }
      bool matched = false;
      for (auto [akey, avalue] : da) {
        if (used.contains(akey.ptr())) continue;
        if (probe(key, akey, child, depth + 1) && probe(value, avalue, child, depth + 1)) {
          used.insert(akey.ptr());
          matched = true;
          break;
        }
      }
      if (!matched) return fail(child, "no matching entry");
    }
    return true;
  }

  bool attributes_equal(py::handle e, py::handle a, const std::string& path, int depth) {
    if (!py::hasattr(e, "__dict__") || !py::hasattr(a, "__dict__")) {
      return py::hasattr(e, "__dict__") == py::hasattr(a, "__dict__") || fail(path, "attribute map differs");
    }
    py::dict de = e.attr("__dict__");
    py::dict da = a.attr("__dict__");
    for (auto [key, value] : de) {
      if (!da.contains(key)) return fail(path + "." + py::str(key).cast<std::string>(), "attribute missing");
    }
    for (auto [key, value] : da) {
      if (!de.contains(key)) return fail(path + "." + py::str(key).cast<std::string>(), "unexpected attribute");
    }
    for (auto [key, value] : de) {
      if (!equal(value, da[key], path + "." + py::str(key).cast<std::string>(), depth + 1)) return false;
    }
    return true;
  }

  const EqualityConfig& cfg_;
  py::object enum_;
  py::object timedelta_;
  py::object deque_;
  py::object bytes_io_;
  py::object string_io_;
  std::set<std::pair<PyObject*, PyObject*>> visited_;
  int probing_ = 0;
  std::string mismatch_;
};

}  // namespace

bool semantic_equal(py::handle expected, py::handle actual, const EqualityConfig& cfg, std::string* mismatch) {
  Comparer comparer(cfg);
  const bool ok = comparer.equal(expected, actual, "$", 0);
  if (mismatch) *mismatch = ok ? std::string() : comparer.mismatch();
  return ok;
}

}  // namespace xlv::pyrt
