"""Regenerate the packaged fixture corpus and print verdict/search agreement."""
import time
from fractions import Fraction as F
from pathlib import Path

from sublevel.exactpoly import Polynomial
from sublevel.problem import make_problem, serialize_problem
from sublevel.degeneracy import decide_degeneracy
from sublevel.witness import find_witness, WitnessFound

OUT = Path(__file__).resolve().parents[1] / "src" / "sublevel" / "fixtures"
x1,x2=Polynomial.variables(2); y1,y2,y3=Polynomial.variables(3); (t,)=Polynomial.variables(1)
pairs3=[[[0,1,0],[0,0,1]],[[1,0,0],[0,0,1]],[[1,0,0],[0,1,0]]]
cone=[[[1,0,1]],[[0,1,1]],[[-1,0,1]],[[0,-1,1]],[[3,4,5]]]
c2=[[[1,0]],[[0,1]]]
three=[[[1,0]],[[0,1]],[[1,1]]]
E=[F(1,10),F(1,100),F(1,1000),F(1,10000)]
fx = {
 'bilinear_xy': (x1*x2, c2),
 'trilinear_xyz': (y1*y2*y3, pairs3),
 'cone5': (y3**2, cone),
 'cubic_three_dirs': (x1**2*x2, three),
 'quartic_four_dirs': (x1**3*x2, [[[1,0]],[[0,1]],[[1,1]],[[1,-1]]]),
 'quartic_four_dirs_degenerate': (x1**2*x2**2, [[[1,0]],[[0,1]],[[1,1]],[[1,-1]]]),
 'rational_maps': (x1*x2, [[[F(1,2),F(1,3)]],[[1,-1]]]),
 'mixed_cubic': (x1*x2 + x1**2 + x2**3, c2),
 'linear_no_maps': (t, []),
 'separable': (x1 + x2**2, c2),
 'quad_three_dirs': (x1*x2, three),
 'quad_general_three_dirs': (x1**2 + 3*x1*x2 - 2*x2**2 + x1, [[[1,0]],[[0,1]],[[1,-2]]]),
 'bilinear_rotated': (x1*x2, [[[1,1]],[[1,-1]]]),
 'cone5_degenerate': ((y1+y3)**2 + (3*y1+4*y2+5*y3)**3 - y2 + 7, cone),
 'pairwise_degenerate': (y1*y2 + y2*y3**2 + F(1,2), pairs3),
 'invertible_map': (x1*x2, [[[1,1],[0,1]]]),
 'constant_phase': (Polynomial.constant(3, 2), c2),
}
from sublevel.problem import Frequency
EXTRA = {
 'linear_no_maps': dict(box=((F(0), F(1)),), lambdas=(Frequency(F(2), True),)),
 'bilinear_xy': dict(box=((F(-1), F(1)),)*2, lambdas=tuple(Frequency(F(2**k)) for k in range(8))),
 'separable': dict(box=((F(-1), F(1)),)*2),
 'constant_phase': dict(lambdas=tuple(Frequency(F(2**k)) for k in range(8))),
}
for name,(P,maps) in fx.items():
    extra = {}
    prob = make_problem(P, maps, name=name, epsilons=tuple(E), budget=6, **EXTRA.get(name, {}))
    t0=time.time()
    v = decide_degeneracy(P, prob.maps)
    r = find_witness(P, prob.maps)
    ok = v.degenerate != isinstance(r, WitnessFound)
    print(f"{name:25s} {v.label:14s} {'N=%d M=%d |S|=%d'%(r.radius,r.modulus,len(r.witness.points)) if isinstance(r,WitnessFound) else 'exhausted':20s} {ok} {time.time()-t0:.2f}s")
    open(OUT / f'{name}.json','w').write(serialize_problem(prob))

from sublevel.problem import ProblemFile
from sublevel.linmaps import MapSystem
ap = ProblemFile(phase=None, maps=MapSystem(1), name="ap3", budget=9, pattern=((0,),(1,),(2,)))
open(OUT / 'ap3.json','w').write(serialize_problem(ap))
corner = ProblemFile(phase=None, maps=MapSystem(2), name="corner", budget=5, pattern=((0,0),(1,0),(0,1)))
open(OUT / 'corner.json','w').write(serialize_problem(corner))
