//! Shared fixtures: the worked systems shipped in examples/ and the
//! integrals printed for them, hand-encoded in the expression grammar.
#![allow(dead_code)]

pub mod props;

use std::path::PathBuf;

use firstint::system::{parse_spec, SystemSpec};

pub fn example_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("examples").join(format!("{name}.json"))
}

pub fn load(name: &str) -> SystemSpec {
    let bytes = std::fs::read(example_path(name)).unwrap_or_else(|e| panic!("{name}: {e}"));
    parse_spec(&bytes).unwrap_or_else(|e| panic!("{name}: {e}"))
}

/// every homogeneous worked system with its printed integral counts:
/// (name, autonomous integrals, all integrals)
pub const GOLDEN: &[(&str, usize, usize)] = &[
    ("sys_1_8", 1, 2),
    ("sys_1_18", 2, 3),
    ("sys_2_3", 2, 4),
    ("sys_2_8", 1, 3),
    ("sys_2_12", 2, 4),
    ("sys_2_18", 2, 4),
    ("sys_2_21", 3, 6),
    ("sys_2_28", 2, 6),
    ("sys_2_32", 4, 6),
    ("sys_2_37", 2, 4),
    ("sys_3_2", 3, 4),
    ("sys_3_6", 2, 3),
    ("sys_3_9", 3, 4),
    ("sys_3_13", 2, 3),
    ("sys_3_17", 2, 3),
    ("sys_3_20", 5, 6),
    ("nonhom_total_2_8", 0, 3),
    ("nonhom_ode_3_6", 0, 3),
    ("nonhom_ode_3_17", 0, 3),
];

fn d(a: &str, b: &str) -> String {
    format!("({a})*pow({b},-1)")
}

fn sq(a: &str) -> String {
    format!("pow({a},2)")
}

/// (system, label, expression) for every printed integral
pub fn printed_integrals() -> Vec<(&'static str, &'static str, String)> {
    let mut out: Vec<(&'static str, &'static str, String)> = Vec::new();
    let mut add = |sys: &'static str, label: &'static str, e: String| out.push((sys, label, e));

    // complex systems: x1..xn are w, the rest their conjugates; t1 = Re z, t2 = Im z
    add("sys_1_8", "product of complex powers", "pow(x2+x3+x4,(1,1))*pow(x1+x2+x4,(2,1))*pow(x2+x3,-1)".into());
    add("sys_1_8", "eigen time", "(x2+x3+x4)*exp(-t1+(0,-2)*t1+(0,-1)*t2)".into());
    add("sys_1_18", "second chain function", d(&format!("(x1+x2)*(x2+x6)-{}", sq("x5")), &sq("x1+x2")));
    add("sys_1_18", "ratio with chain exponent", format!("{}*exp((0,1)*{})", d("x4+x5", "x1+x2"), d("x5", "x1+x2")));
    add("sys_1_18", "chain time", format!("{}-2*t1", d("x5", "x1+x2")));

    add("sys_2_3", "squared ratio", d(&sq("x3-x4"), &sq("x1")));
    add("sys_2_3", "quartic product", format!("pow(x1,4)*pow({}-{},2)", sq("x2"), sq("x3+x4")));
    add("sys_2_3", "first eigen time", "(-x2+x3+x4)*exp(2*t1-t2)".into());
    add("sys_2_3", "second eigen time", "x1*exp(t2)".into());

    add("sys_2_8", "conjugate product", format!("{}*exp(2*atan2(x2,x1))", d("pow(x1,2)+pow(x2,2)", &sq("x3"))));
    add("sys_2_8", "modulus time", "(pow(x1,2)+pow(x2,2))*exp(-2*t1)".into());
    add("sys_2_8", "argument time", "atan2(x2,x1)+t2".into());

    add("sys_2_12", "bilinear ratio", d("x1*x2+x3*x4", "x1*x4-x2*x3"));
    add("sys_2_12", "product of moduli", "(pow(x1,2)+pow(x3,2))*(pow(x2,2)+pow(x4,2))".into());
    add("sys_2_12", "modulus time", "(pow(x2,2)+pow(x4,2))*exp(2*t1)".into());
    add("sys_2_12", "argument time", "atan2(x2,x4)-t2".into());

    {
        let l0 = "(-x1+x2-x3)";
        let l1 = "(x1-x3-x4)";
        let l2 = "(x1-x2+3*x3)";
        let l3 = "(-3*x1+9*x3+9*x4)";
        let v1 = d(l1, l0);
        let v2 = d(&format!("{l0}*{l2}-pow({l1},2)"), &sq(l0));
        let v3 = format!("({l3}*pow({l0},2)-3*{l0}*{l1}*{l2}+2*pow({l1},3))*pow({l0},-3)");
        add("sys_2_18", "second chain function", v2.clone());
        add("sys_2_18", "chain product", format!("pow({l0},2)*exp(-2*{v1}-({v3}))"));
        add("sys_2_18", "first chain time", format!("{v1}-t1+t2"));
        add("sys_2_18", "third chain time", format!("{v3}-6*t2"));
    }

    // shared by the two six-dimensional families with a cubed complex divisor
    let a = "(x1+x3+x4+x6)";
    let b = "(x3+x5)";
    let p = format!("(pow({a},2)+pow({b},2))");
    let phi = format!("atan2({b},{a})");
    let n1 = format!("((x1+x2)*{a}+{b}*(x2+x5+x6))");
    let n2 = format!("({a}*(x2+x5+x6)-(x1+x2)*{b})");
    let vs1 = d(&n1, &p);
    let vt1 = d(&n2, &p);
    let vs2 = d(&format!("pow({n2},2)+2*{p}*((x1+x3)*{a}+{b}*(x1+x3+x5+x6))-pow({n1},2)"), &sq(&p));
    let vt2 = d(&format!("2*({p}*({a}*(x1+x3+x5+x6)-(x1+x3)*{b})-{n2}*{n1})"), &sq(&p));

    add("sys_2_21", "first conjugate chain product", format!("{p}*exp(-4*{phi}+6*{vs1}+2*{vt1})"));
    add("sys_2_21", "second conjugate chain product", format!("pow({p},2)*exp(-2*{phi}+{vs2}-({vt2}))"));
    add("sys_2_21", "chain combination", format!("2*{vt1}-2*{vs2}-({vt2})"));
    add("sys_2_21", "real chain time", format!("{vs1}-t1-t2"));
    add("sys_2_21", "imaginary chain time", format!("{vt1}+t2-t3"));
    add("sys_2_21", "second real chain time", format!("{vs2}-2*t3"));

    add("sys_2_32", "first product", format!("{p}*exp(-{phi}-({vt1}))"));
    add("sys_2_32", "second product", format!("{p}*exp(-2*{phi}+2*{vs1})"));
    add("sys_2_32", "third product", format!("pow({p},2)*exp(-2*{phi}-({vt2}))"));
    add("sys_2_32", "second real chain function", vs2.clone());
    add("sys_2_32", "real chain time", format!("{vs1}-t1-t2"));
    add("sys_2_32", "imaginary chain time", format!("{vt1}+t2"));

    {
        let a1 = "(x1+x2)";
        let b1 = "(x2+x5+x6)";
        let p1 = format!("(pow({a1},2)+pow({b1},2))");
        let phi1 = format!("atan2({b1},{a1})");
        let ws = d(&format!("{a1}*(x1+x3)+{b1}*(x1+x3+x5+x6)"), &p1);
        let wt = d(&format!("{a1}*(x1+x3+x5+x6)-(x1+x3)*{b1}"), &p1);
        add("sys_2_28", "first product", format!("{p1}*pow({p},2)*exp(-10*{phi1}+8*{ws}+6*{wt})"));
        add("sys_2_28", "second product", format!("pow({p1},3)*exp(-10*{phi1}-4*{phi}+12*{ws}+14*{wt})"));
        add("sys_2_28", "modulus time", format!("{p1}*exp(-2*t1+2*t2-4*t3+2*t4)"));
        add("sys_2_28", "argument time", format!("{phi1}-t1-2*t4"));
        add("sys_2_28", "real chain time", format!("{ws}-t1+t3-t4"));
        add("sys_2_28", "imaginary chain time", format!("{wt}-t2-t4"));
    }

    add("sys_2_37", "first chain product", format!("(x1+x3)*pow(x2+x3,2)*exp(-3*{})", d("x2", "x1+x3")));
    add("sys_2_37", "second chain product", format!("{}*exp(3*{})", d("x2+x3", "x1+x3"), d("x4", "x2+x3")));

    add("sys_3_2", "kernel form", "x1-x2+x3-x4".into());
    add("sys_3_2", "equal eigenvalue ratio", d("2*x1+2*x2+x3+x4", "x1+x3"));
    add("sys_3_2", "power ratio", d(&sq("2*x1+2*x2+x3+x4"), "2*x2+x4"));
    add("sys_3_2", "eigen time", "(2*x1+2*x2+x3+x4)*exp(-t1)".into());

    add("sys_3_6", "modulus and argument", "(pow(x1-x3,2)+pow(x2,2))*exp(-6*atan2(x2,x1-x3))".into());
    add("sys_3_6", "real form and argument", "(3*x1-x2-x3)*exp(-2*atan2(x2,x1-x3))".into());
    add("sys_3_6", "eigen time", "(3*x1-x2-x3)*exp(-2*t1)".into());

    add("sys_3_9", "first modulus", "pow(x1-x2+2*x4,2)+pow(-x1+2*x2+2*x3,2)".into());
    add("sys_3_9", "second modulus", "pow(-x2+x4,2)+pow(x1+x3+2*x4,2)".into());
    add("sys_3_9", "argument combination", "atan2(x1+x3+2*x4,-x2+x4)-2*atan2(-x1+2*x2+2*x3,x1-x2+2*x4)".into());
    add("sys_3_9", "argument time", "atan2(-x1+2*x2+2*x3,x1-x2+2*x4)-t1".into());

    add("sys_3_13", "kernel form", "x1-2*x2+x3".into());
    add("sys_3_13", "chain product", format!("(3*x1-3*x2+x3)*exp({})", d("x2-x3", "x1-2*x2+x3")));
    add("sys_3_13", "chain time", format!("{}-t1", d("x3-x2", "x1-2*x2+x3")));

    add("sys_3_17", "chain product", format!("(x1-x2+x3)*exp(-2*{})", d("x1-x3", "x1-x2+x3")));
    add("sys_3_17", "second chain function", d("pow(x1-x3,2)-2*x3*(x1-x2+x3)", &sq("x1-x2+x3")));
    add("sys_3_17", "chain time", format!("{}-t1", d("x1-x3", "x1-x2+x3")));

    {
        let p = "(pow(x1+x2,2)+pow(x5,2))";
        let al = "((x1+x2)*(x2+x6)+x5*(x4+x5))";
        let be = "((x1+x2)*(x4+x5)-x5*(x2+x6))";
        let ga = "(x2*(x1+x2)+x5*(x3+x5))";
        let de = "((x1+x2)*(x3+x5)-x2*x5)";
        let phi = "atan2(x5,x1+x2)";
        add("sys_3_20", "modulus and argument", format!("{p}*exp(-2*{phi})"));
        add("sys_3_20", "modulus and chain", format!("{p}*exp(-2*{})", d(&format!("{al}-{be}"), p)));
        add("sys_3_20", "argument and chain", format!("{phi}-{}", d(&format!("{al}+{be}"), p)));
        add("sys_3_20", "second real chain function", d(&format!("{ga}*{p}+pow({be},2)-pow({al},2)"), &sq(p)));
        add("sys_3_20", "second imaginary chain function", d(&format!("{de}*{p}-2*{al}*{be}"), &sq(p)));
        add("sys_3_20", "chain time", format!("{}-t1", d(al, p)));
    }
    out.extend(forced_integrals());
    out
}

/// closed forms printed for the three forced examples
pub fn forced_integrals() -> Vec<(&'static str, &'static str, String)> {
    let c = "re(exp((0,1)*t1))";
    let s = "im(exp((0,1)*t1))";
    let c2 = "re(exp((0,1)*t2))";
    let s2 = "im(exp((0,1)*t2))";
    let f1 = "((x1-x2+x3-4*t1)*exp(-2*t1)-exp(t1))";
    let f2 = format!("((x1-x3+2*t1-1)*exp(-2*t1)-t1*{f1}-2*exp(t1))");
    vec![
        ("nonhom_ode_3_6", "real eigenvalue", "(3*x1-x2-x3-5)*exp(-2*t1)+exp(t1)-6*t1".into()),
        (
            "nonhom_ode_3_6",
            "complex eigenvalue, first part",
            format!("((x1-x3+1)*{c}+(x2+3)*{s})*exp(-3*t1)+({c}-{s})*exp(-t1)+{s}"),
        ),
        (
            "nonhom_ode_3_6",
            "complex eigenvalue, second part",
            format!("((x2+3)*{c}+(x3-x1-1)*{s})*exp(-3*t1)-({c}+{s})*exp(-t1)+{c}"),
        ),
        ("nonhom_ode_3_17", "chain head", f1.to_string()),
        ("nonhom_ode_3_17", "chain middle", f2.clone()),
        (
            "nonhom_ode_3_17",
            "chain top",
            format!("2*(x2-x1+3*t1+2)*exp(-2*t1)-pow(t1,2)*{f1}-2*t1*{f2}-2*exp(t1)"),
        ),
        (
            "nonhom_total_2_8",
            "rotation, first part",
            format!("(x1*{c2}-x2*{s2}-{s2})*exp(-t1)+0.8*(0.5*{s2}-{c2})*exp(0.5*t2)"),
        ),
        (
            "nonhom_total_2_8",
            "rotation, second part",
            format!("(x1*{s2}+x2*{c2}+{c2})*exp(-t1)-0.8*(0.5*{c2}+{s2})*exp(0.5*t2)"),
        ),
        ("nonhom_total_2_8", "decaying coordinate", "(x3+t2-t1-1)*exp(t2-t1)".into()),
    ]
}

/// the printed chain for sys_2_18, used for its derivative constants
pub fn chain_2_18() -> Vec<Vec<f64>> {
    vec![vec![-1.0, 1.0, -1.0, 0.0], vec![1.0, 0.0, -1.0, -1.0], vec![1.0, -1.0, 3.0, 0.0], vec![-3.0, 0.0, 9.0, 9.0]]
}
