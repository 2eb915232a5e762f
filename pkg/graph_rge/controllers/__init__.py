from . import bench, cv, embed, gen, kernel, rsweep

COMMANDS = (embed, kernel, cv, bench, gen, rsweep)
