/*
 * Copyright 2026 The Voidscope Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "voidscope/html.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <unordered_map>

#include "voidscope/text.hpp"

namespace voidscope::html {

namespace {

bool IsVoidElement(std::string_view tag) {
  static constexpr std::array<std::string_view, 14> kVoid = {
      "area", "base", "br", "col", "embed", "hr", "img",
      "input", "link", "meta", "param", "source", "track", "wbr"};
  return std::find(kVoid.begin(), kVoid.end(), tag) != kVoid.end();
}

bool IsRawText(std::string_view tag) {
  return tag == "script" || tag == "style" || tag == "textarea" || tag == "title";
}

bool IsSpace(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f';
}

bool IsNameChar(char c) {
  return !IsSpace(c) && c != '>' && c != '/' && c != '=' && c != '\0';
}

std::size_t FindCaseInsensitive(std::string_view hay, std::string_view needle,
                                std::size_t from) {
  if (needle.empty()) return from;
  for (std::size_t i = from; i + needle.size() <= hay.size(); ++i) {
    if (text::IEquals(hay.substr(i, needle.size()), needle)) return i;
  }
  return std::string_view::npos;
}

class Builder {
 public:
  explicit Builder(std::string_view src) : src_(src) {
    doc_.root = std::make_unique<Node>();
    stack_.push_back(doc_.root.get());
  }

  Document Run() {
    while (pos_ < src_.size()) {
      if (src_[pos_] == '<') {
        if (!Markup()) Text(pos_, pos_ + 1);
      } else {
        std::size_t next = src_.find('<', pos_);
        if (next == std::string_view::npos) next = src_.size();
        Text(pos_, next);
      }
    }
    return std::move(doc_);
  }

 private:
  Node* top() { return stack_.back(); }

  void Text(std::size_t begin, std::size_t end) {
    AppendText(DecodeEntities(src_.substr(begin, end - begin)));
    pos_ = end;
  }

  void AppendText(std::string decoded) {
    if (decoded.empty()) return;
    Node* parent = top();
    if (!parent->children.empty() && !parent->children.back()->is_element()) {
      parent->children.back()->text += decoded;
      return;
    }
    auto node = std::make_unique<Node>();
    node->kind = Node::Kind::kText;
    node->text = std::move(decoded);
    node->parent = parent;
    parent->children.push_back(std::move(node));
  }

  // Returns false when '<' does not start markup (treated as text).
  bool Markup() {
    std::string_view rest = src_.substr(pos_);
    if (rest.starts_with("<!--")) {
      const auto end = src_.find("-->", pos_ + 4);
      pos_ = end == std::string_view::npos ? src_.size() : end + 3;
      return true;
    }
    if (rest.starts_with("<!") || rest.starts_with("<?")) {
      const auto end = src_.find('>', pos_);
      pos_ = end == std::string_view::npos ? src_.size() : end + 1;
      return true;
    }
    if (rest.starts_with("</")) {
      std::size_t i = pos_ + 2;
      std::size_t start = i;
      while (i < src_.size() && IsNameChar(src_[i])) ++i;
      if (i == start) return false;
      const std::string tag = text::ToLowerAscii(src_.substr(start, i - start));
      const auto end = src_.find('>', i);
      pos_ = end == std::string_view::npos ? src_.size() : end + 1;
      Close(tag);
      return true;
    }
    if (rest.size() < 2 || !std::isalpha(static_cast<unsigned char>(rest[1]))) {
      return false;
    }
    return StartTag();
  }

  bool StartTag() {
    std::size_t i = pos_ + 1;
    std::size_t start = i;
    while (i < src_.size() && IsNameChar(src_[i])) ++i;
    auto node = std::make_unique<Node>();
    node->tag = text::ToLowerAscii(src_.substr(start, i - start));
    bool self_closing = false;
    while (i < src_.size()) {
      while (i < src_.size() && IsSpace(src_[i])) ++i;
      if (i >= src_.size()) break;
      if (src_[i] == '>') {
        ++i;
        break;
      }
      if (src_[i] == '/') {
        self_closing = true;
        ++i;
        continue;
      }
      std::size_t name_start = i;
      while (i < src_.size() && IsNameChar(src_[i])) ++i;
      if (i == name_start) {
        ++i;  // stray character
        continue;
      }
      std::string name = text::ToLowerAscii(src_.substr(name_start, i - name_start));
      while (i < src_.size() && IsSpace(src_[i])) ++i;
      std::string value;
      if (i < src_.size() && src_[i] == '=') {
        ++i;
        while (i < src_.size() && IsSpace(src_[i])) ++i;
        if (i < src_.size() && (src_[i] == '"' || src_[i] == '\'')) {
          const char quote = src_[i++];
          const std::size_t v = i;
          while (i < src_.size() && src_[i] != quote) ++i;
          value = DecodeEntities(src_.substr(v, i - v));
          if (i < src_.size()) ++i;
        } else {
          const std::size_t v = i;
          while (i < src_.size() && !IsSpace(src_[i]) && src_[i] != '>') ++i;
          value = DecodeEntities(src_.substr(v, i - v));
        }
      }
      self_closing = false;
      node->attrs.emplace_back(std::move(name), std::move(value));
    }
    pos_ = i;

    const std::string tag = node->tag;
    Node* parent = top();
    node->parent = parent;
    Node* raw = node.get();
    parent->children.push_back(std::move(node));
    ++doc_.element_count;
    if (IsVoidElement(tag) || self_closing) return true;
    if (IsRawText(tag)) {
      const std::string closer = "</" + tag;
      std::size_t end = FindCaseInsensitive(src_, closer, pos_);
      if (end == std::string_view::npos) end = src_.size();
      std::string body(src_.substr(pos_, end - pos_));
      if (tag == "title" || tag == "textarea") body = DecodeEntities(body);
      if (!body.empty()) {
        auto t = std::make_unique<Node>();
        t->kind = Node::Kind::kText;
        t->text = std::move(body);
        t->parent = raw;
        raw->children.push_back(std::move(t));
      }
      const auto gt = src_.find('>', end);
      pos_ = gt == std::string_view::npos ? src_.size() : gt + 1;
      return true;
    }
    // <p> and <li> do not nest in practice; close an open sibling first.
    if (tag == "p" || tag == "li") {
      for (std::size_t k = stack_.size(); k-- > 1;) {
        if (stack_[k]->tag == tag) {
          stack_.resize(k);
          break;
        }
        if (stack_[k]->tag == "div" || stack_[k]->tag == "ul" || stack_[k]->tag == "ol") break;
      }
      raw->parent = top();
      if (raw->parent != parent) {
        auto moved = std::move(parent->children.back());
        parent->children.pop_back();
        raw->parent->children.push_back(std::move(moved));
      }
    }
    stack_.push_back(raw);
    return true;
  }

  // Pops to the nearest open element with this tag; stray end tags are
  // ignored.
  void Close(const std::string& tag) {
    for (std::size_t k = stack_.size(); k-- > 1;) {
      if (stack_[k]->tag == tag) {
        stack_.resize(k);
        return;
      }
    }
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  Document doc_;
  std::vector<Node*> stack_;
};

void CollectText(const Node& node, std::string& out) {
  if (!node.is_element()) {
    out += node.text;
    return;
  }
  if (node.tag == "script" || node.tag == "style") return;
  const bool block = node.tag == "div" || node.tag == "p" || node.tag == "br" ||
                     node.tag == "li" || node.tag == "span" || node.tag == "h3";
  if (block) out += ' ';
  for (const auto& c : node.children) CollectText(*c, out);
  if (block) out += ' ';
}

}  // namespace

const std::string* Node::Attr(std::string_view name) const {
  for (const auto& [k, v] : attrs) {
    if (k == name) return &v;
  }
  return nullptr;
}

std::string_view Node::Id() const {
  const std::string* id = Attr("id");
  return id ? std::string_view(*id) : std::string_view();
}

bool Node::HasClass(std::string_view cls) const {
  const std::string* classes = Attr("class");
  if (!classes) return false;
  for (std::string_view c : text::SplitWhitespace(*classes)) {
    if (c == cls) return true;
  }
  return false;
}

std::string Node::InnerText() const {
  std::string out;
  CollectText(*this, out);
  return text::CollapseWhitespace(out);
}

Document Parse(std::string_view html) { return Builder(html).Run(); }

std::string DecodeEntities(std::string_view s) {
  static const std::unordered_map<std::string_view, char32_t> kNamed = {
      {"amp", '&'},       {"lt", '<'},         {"gt", '>'},
      {"quot", '"'},      {"apos", '\''},      {"nbsp", 0xA0},
      {"thinsp", 0x2009}, {"ensp", 0x2002},    {"emsp", 0x2003},
      {"rsquo", 0x2019},  {"lsquo", 0x2018},   {"rdquo", 0x201D},
      {"ldquo", 0x201C},  {"hellip", 0x2026},  {"middot", 0xB7},
      {"mdash", 0x2014},  {"ndash", 0x2013},   {"copy", 0xA9},
      {"reg", 0xAE},      {"trade", 0x2122},   {"laquo", 0xAB},
      {"raquo", 0xBB},    {"bull", 0x2022},    {"zwj", 0x200D},
      {"zwnj", 0x200C},
  };
  std::string out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    if (s[i] != '&') {
      out += s[i++];
      continue;
    }
    const auto semi = s.find(';', i + 1);
    if (semi == std::string_view::npos || semi - i > 12) {
      out += s[i++];
      continue;
    }
    const std::string_view name = s.substr(i + 1, semi - i - 1);
    char32_t cp = 0;
    bool ok = false;
    if (name.size() >= 2 && name[0] == '#') {
      const bool hex = name[1] == 'x' || name[1] == 'X';
      const std::string digits(name.substr(hex ? 2 : 1));
      if (!digits.empty() && digits.size() <= 8) {
        try {
          std::size_t used = 0;
          const unsigned long v = std::stoul(digits, &used, hex ? 16 : 10);
          if (used == digits.size() && v > 0 && v <= 0x10FFFF) {
            cp = static_cast<char32_t>(v);
            ok = true;
          }
        } catch (const std::exception&) {
        }
      }
    } else if (auto it = kNamed.find(name); it != kNamed.end()) {
      cp = it->second;
      ok = true;
    }
    if (!ok) {
      out += s[i++];
      continue;
    }
    text::AppendUtf8(out, cp);
    i = semi + 1;
  }
  return out;
}

void Walk(const Node& node, const std::function<void(const Node&)>& visit) {
  visit(node);
  for (const auto& c : node.children) Walk(*c, visit);
}

const Node* FindById(const Node& root, std::string_view id) {
  return FindFirst(root, [&](const Node& n) { return n.is_element() && n.Id() == id; });
}

std::vector<const Node*> FindAll(const Node& root,
                                 const std::function<bool(const Node&)>& pred) {
  std::vector<const Node*> out;
  Walk(root, [&](const Node& n) {
    if (pred(n)) out.push_back(&n);
  });
  return out;
}

namespace {
void Outermost(const Node& node, const std::function<bool(const Node&)>& pred,
               std::vector<const Node*>& out) {
  if (pred(node)) {
    out.push_back(&node);
    return;
  }
  for (const auto& c : node.children) Outermost(*c, pred, out);
}

const Node* First(const Node& node, const std::function<bool(const Node&)>& pred) {
  if (pred(node)) return &node;
  for (const auto& c : node.children) {
    if (const Node* hit = First(*c, pred)) return hit;
  }
  return nullptr;
}
}  // namespace

std::vector<const Node*> FindOutermost(const Node& root,
                                       const std::function<bool(const Node&)>& pred) {
  std::vector<const Node*> out;
  for (const auto& c : root.children) Outermost(*c, pred, out);
  return out;
}

const Node* FindFirst(const Node& root, const std::function<bool(const Node&)>& pred) {
  return First(root, pred);
}

bool HasAncestor(const Node& node, const std::function<bool(const Node&)>& pred,
                 const Node* stop) {
  for (const Node* p = node.parent; p && p != stop; p = p->parent) {
    if (pred(*p)) return true;
  }
  return false;
}

}  // namespace voidscope::html
