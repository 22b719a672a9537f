//! The heap operations on canonical heap values.

use super::value::{AddressValue, HeapValue, Value};

pub fn sem_empty_heap() -> HeapValue {
    HeapValue::default()
}

pub fn sem_null_address() -> AddressValue {
    AddressValue::NULL
}

pub fn sem_nth_address(i: u64) -> AddressValue {
    AddressValue(i)
}

pub fn sem_valid(h: &HeapValue, a: AddressValue) -> bool {
    a.0 >= 1 && a.0 <= h.size()
}

pub fn sem_read(h: &HeapValue, a: AddressValue, def_obj: &Value) -> Value {
    if sem_valid(h, a) {
        h.contents[(a.0 - 1) as usize].clone()
    } else {
        def_obj.clone()
    }
}

pub fn sem_write(h: &HeapValue, a: AddressValue, o: Value) -> HeapValue {
    let mut out = h.clone();
    if sem_valid(h, a) {
        out.contents[(a.0 - 1) as usize] = o;
    }
    out
}

pub fn sem_allocate(h: &HeapValue, o: Value) -> (HeapValue, AddressValue) {
    let mut out = h.clone();
    out.contents.push(o);
    let a = AddressValue(out.size());
    (out, a)
}

/// Heap reached by `n` allocations of `o` from the empty heap.
pub fn allocate_n(n: u64, o: &Value) -> HeapValue {
    HeapValue {
        contents: vec![o.clone(); n as usize],
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn obj(i: i64) -> Value {
        Value::int(i)
    }

    fn heap(objs: &[i64]) -> HeapValue {
        HeapValue {
            contents: objs.iter().map(|&i| obj(i)).collect(),
        }
    }

    #[test]
    fn empty_heap_is_unallocated() {
        let e = sem_empty_heap();
        assert_eq!(e.size(), 0);
        assert!(!sem_valid(&e, AddressValue(3)));
        assert_eq!(sem_read(&e, AddressValue(1), &obj(9)), obj(9));
    }

    #[test]
    fn validity_range() {
        let h = heap(&[1, 2]);
        assert!(sem_valid(&h, AddressValue(1)));
        assert!(!sem_valid(&h, AddressValue(0)));
        assert!(!sem_valid(&h, AddressValue(3)));
    }

    #[test]
    fn allocation() {
        let (h, a) = sem_allocate(&sem_empty_heap(), obj(5));
        assert_eq!(h, heap(&[5]));
        assert_eq!(a, AddressValue(1));
        let (_, a1) = sem_allocate(&heap(&[1, 2]), obj(0));
        let (_, a2) = sem_allocate(&heap(&[3, 4]), obj(1));
        assert_eq!(a1, a2);
        let mut h = sem_empty_heap();
        for i in 1..=4 {
            let (h2, a) = sem_allocate(&h, obj(0));
            assert_eq!(a, sem_nth_address(i));
            h = h2;
        }
    }

    #[test]
    fn reads_and_writes() {
        let h = heap(&[1, 2]);
        assert_eq!(sem_write(&h, AddressValue(3), obj(7)), h);
        assert_eq!(sem_write(&h, AddressValue(0), obj(7)), h);
        let w = sem_write(&h, AddressValue(2), obj(7));
        assert_eq!(w.size(), 2);
        assert_eq!(sem_read(&w, AddressValue(2), &obj(0)), obj(7));
        assert_eq!(sem_read(&w, AddressValue(1), &obj(0)), obj(1));
        assert_eq!(sem_read(&h, sem_null_address(), &obj(0)), obj(0));
    }

    /// write(write(h,a,o1),a,o2) = write(h,a,o2), checked against an
    /// independent list-of-pairs heap for every heap of size ≤ 3 over 3 objects.
    #[test]
    fn write_overwrites_by_enumeration() {
        let objs = [0i64, 1, 2];
        let mut heaps = vec![vec![]];
        for _ in 0..3 {
            let next: Vec<Vec<i64>> = heaps
                .iter()
                .filter(|h: &&Vec<i64>| h.len() == heaps.last().unwrap().len())
                .flat_map(|h| objs.iter().map(move |&o| [h.clone(), vec![o]].concat()))
                .collect();
            heaps.extend(next);
        }
        assert_eq!(heaps.len(), 1 + 3 + 9 + 27);
        for h in &heaps {
            let hv = heap(h);
            for a in 0..=4u64 {
                for &o1 in &objs {
                    for &o2 in &objs {
                        let lhs = sem_write(&sem_write(&hv, AddressValue(a), obj(o1)), AddressValue(a), obj(o2));
                        let rhs = sem_write(&hv, AddressValue(a), obj(o2));
                        assert_eq!(lhs, rhs);
                        // Oracle: association list updated only inside the range.
                        let mut expect = h.clone();
                        if a >= 1 && (a as usize) <= h.len() {
                            expect[a as usize - 1] = o2;
                        }
                        assert_eq!(rhs, heap(&expect));
                    }
                }
            }
        }
    }
}
