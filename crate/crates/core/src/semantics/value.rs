use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

/// Address index; 0 is the null address and the i-th allocation returns i.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AddressValue(pub u64);

impl AddressValue {
    pub const NULL: AddressValue = AddressValue(0);
}

/// A finite heap in canonical form: `contents[i - 1]` is the object at
/// address `i`, and the size is the number of allocations performed.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
#[serde(try_from = "HeapRepr", into = "HeapRepr")]
pub struct HeapValue {
    pub contents: Vec<Value>,
}

#[derive(Serialize, Deserialize)]
struct HeapRepr {
    size: usize,
    objects: Vec<Value>,
}

impl TryFrom<HeapRepr> for HeapValue {
    type Error = String;

    fn try_from(r: HeapRepr) -> Result<Self, String> {
        if r.size != r.objects.len() {
            return Err(format!(
                "heap size {} does not match {} objects",
                r.size,
                r.objects.len()
            ));
        }
        Ok(HeapValue { contents: r.objects })
    }
}

impl From<HeapValue> for HeapRepr {
    fn from(h: HeapValue) -> Self {
        HeapRepr {
            size: h.contents.len(),
            objects: h.contents,
        }
    }
}

impl HeapValue {
    pub fn size(&self) -> u64 {
        self.contents.len() as u64
    }
}

/// Array with finitely many entries differing from the default.
///
/// Canonical: no entry maps to the default value, so structural equality is
/// extensional equality.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "ArrayRepr", into = "ArrayRepr")]
pub struct ArrayValue {
    default: Box<Value>,
    entries: BTreeMap<Value, Value>,
}

#[derive(Serialize, Deserialize)]
struct ArrayRepr {
    default: Value,
    entries: Vec<(Value, Value)>,
}

impl TryFrom<ArrayRepr> for ArrayValue {
    type Error = String;

    fn try_from(r: ArrayRepr) -> Result<Self, String> {
        let mut a = ArrayValue::constant(r.default);
        for (k, v) in r.entries {
            a = a.store(k, v);
        }
        Ok(a)
    }
}

impl From<ArrayValue> for ArrayRepr {
    fn from(a: ArrayValue) -> Self {
        ArrayRepr {
            default: *a.default,
            entries: a.entries.into_iter().collect(),
        }
    }
}

impl ArrayValue {
    pub fn constant(default: Value) -> Self {
        ArrayValue {
            default: Box::new(default),
            entries: BTreeMap::new(),
        }
    }

    pub fn default_value(&self) -> &Value {
        &self.default
    }

    pub fn entries(&self) -> &BTreeMap<Value, Value> {
        &self.entries
    }

    pub fn select(&self, k: &Value) -> Value {
        self.entries.get(k).unwrap_or(&self.default).clone()
    }

    pub fn store(&self, k: Value, v: Value) -> Self {
        let mut out = self.clone();
        if v == *out.default {
            out.entries.remove(&k);
        } else {
            out.entries.insert(k, v);
        }
        out
    }
}

mod int_string {
    use num_bigint::BigInt;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(i: &BigInt, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&i.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigInt, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Concrete value of any sort.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Value {
    Bool(bool),
    /// Serialized as a decimal string.
    Int(#[serde(with = "int_string")] BigInt),
    Addr(AddressValue),
    Heap(HeapValue),
    /// Datatype value, identified by constructor name.
    Ctor {
        name: String,
        args: Vec<Value>,
    },
    /// Element `index` of an uninterpreted sort's finite universe.
    Elem {
        sort: String,
        index: u32,
    },
    Array(ArrayValue),
}

impl Value {
    pub fn int(i: impl Into<BigInt>) -> Value {
        Value::Int(i.into())
    }

    pub fn addr(i: u64) -> Value {
        Value::Addr(AddressValue(i))
    }

    pub fn ctor(name: impl Into<String>, args: Vec<Value>) -> Value {
        Value::Ctor {
            name: name.into(),
            args,
        }
    }

    pub fn as_bool(&self) -> Option<bool> {
        match self {
            Value::Bool(b) => Some(*b),
            _ => None,
        }
    }

    pub fn as_int(&self) -> Option<&BigInt> {
        match self {
            Value::Int(i) => Some(i),
            _ => None,
        }
    }

    pub fn as_addr(&self) -> Option<AddressValue> {
        match self {
            Value::Addr(a) => Some(*a),
            _ => None,
        }
    }

    pub fn as_heap(&self) -> Option<&HeapValue> {
        match self {
            Value::Heap(h) => Some(h),
            _ => None,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Bool(b) => write!(f, "{b}"),
            Value::Int(i) if i.sign() == num_bigint::Sign::Minus => write!(f, "(- {})", i.magnitude()),
            Value::Int(i) => write!(f, "{i}"),
            Value::Addr(a) => write!(f, "#addr{}", a.0),
            Value::Heap(h) => {
                write!(f, "#heap[")?;
                for (i, o) in h.contents.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{}:{o}", i + 1)?;
                }
                write!(f, "]")
            }
            Value::Ctor { name, args } if args.is_empty() => write!(f, "{name}"),
            Value::Ctor { name, args } => {
                write!(f, "({name}")?;
                for a in args {
                    write!(f, " {a}")?;
                }
                write!(f, ")")
            }
            Value::Elem { sort, index } => write!(f, "{sort}!{index}"),
            Value::Array(a) => {
                let mut s = format!("((as const _) {})", a.default);
                for (k, v) in &a.entries {
                    s = format!("(store {s} {k} {v})");
                }
                write!(f, "{s}")
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_forms() {
        let h = Value::Heap(HeapValue {
            contents: vec![Value::ctor("O_Empty", vec![]), Value::int(-7)],
        });
        let j = serde_json::to_string(&h).unwrap();
        assert_eq!(
            j,
            r#"{"heap":{"size":2,"objects":[{"ctor":{"name":"O_Empty","args":[]}},{"int":"-7"}]}}"#
        );
        assert_eq!(serde_json::from_str::<Value>(&j).unwrap(), h);
        assert!(serde_json::from_str::<Value>(r#"{"heap":{"size":3,"objects":[]}}"#).is_err());
        assert_eq!(serde_json::to_string(&Value::addr(3)).unwrap(), r#"{"addr":3}"#);
    }

    #[test]
    fn arrays_are_canonical() {
        let a = ArrayValue::constant(Value::int(0));
        let b = a
            .store(Value::int(1), Value::int(5))
            .store(Value::int(1), Value::int(0));
        assert_eq!(a, b);
        assert_eq!(b.select(&Value::int(1)), Value::int(0));
        let j = serde_json::to_string(&Value::Array(a.store(Value::int(2), Value::int(1)))).unwrap();
        assert_eq!(
            serde_json::from_str::<Value>(&j).unwrap(),
            Value::Array(a.store(Value::int(2), Value::int(1)))
        );
    }
}
